//! Parse an OSM XML extract and list the building footprints it contains.
//!
//! ```bash
//! cargo run --example parse_footprints
//! ```

use osmseg::osm::{extract_footprints, parse_osm, FootprintFilter};

const EXTRACT: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<osm version="0.6">
  <node id="1" lon="-6.25560" lat="53.34365"/>
  <node id="2" lon="-6.25500" lat="53.34365"/>
  <node id="3" lon="-6.25500" lat="53.34400"/>
  <node id="4" lon="-6.25560" lat="53.34400"/>
  <node id="11" lon="-6.25460" lat="53.34370"/>
  <node id="12" lon="-6.25420" lat="53.34370"/>
  <node id="13" lon="-6.25420" lat="53.34395"/>
  <node id="14" lon="-6.25460" lat="53.34395"/>
  <way id="101">
    <nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="4"/><nd ref="1"/>
    <tag k="building" v="university"/>
    <tag k="name" v="Museum Building"/>
  </way>
  <way id="102">
    <nd ref="11"/><nd ref="12"/><nd ref="13"/><nd ref="14"/><nd ref="11"/>
    <tag k="building" v="yes"/>
  </way>
</osm>"#;

fn main() {
    let doc = parse_osm(EXTRACT).expect("well-formed extract");
    println!(
        "parsed {} nodes, {} ways, {} relations",
        doc.nodes.len(),
        doc.ways.len(),
        doc.relations.len()
    );

    let all = extract_footprints(&doc, &FootprintFilter::Buildings).unwrap();
    for w in &all.warnings {
        println!("warning: {w}");
    }
    println!("\nall buildings:");
    for f in &all.footprints {
        println!(
            "  {:<20} {} vertices, first {:?}",
            f.name,
            f.ring.len(),
            f.ring[0]
        );
    }

    let named = extract_footprints(
        &doc,
        &FootprintFilter::Names(vec!["Museum Building".to_string()]),
    )
    .unwrap();
    println!("\nby name filter: {} match", named.footprints.len());
}
