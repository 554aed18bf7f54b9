//! OSM XML ingestion: nodes, ways and relations, and building-footprint
//! extraction.
//!
//! Accepts the OSM v0.6 planet-extract subset: `node` elements with `id`,
//! `lon`, `lat`; `way` elements with ordered `nd ref=...` children and
//! `tag k/v` children; `relation` elements are retained verbatim but never
//! turned into geometry (multipolygons are skipped with a warning). Unknown
//! elements and attributes are ignored.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OsmError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("element <{element}> is missing or has unparseable attribute `{attribute}`")]
    BadAttribute {
        element: &'static str,
        attribute: &'static str,
    },
    #[error("node {node_id} has coordinate ({lon}, {lat}) outside valid WGS84 range")]
    CoordinateOutOfRange { node_id: i64, lon: f64, lat: f64 },
    #[error("way {way_id} references missing node {node_id}")]
    DanglingReference { way_id: i64, node_id: i64 },
    #[error("way {way_id} has fewer than 3 distinct vertices")]
    DegenerateFootprint { way_id: i64 },
    #[error("way {way_id} ring is self-intersecting")]
    SelfIntersectingWay { way_id: i64 },
}

/// A way: ordered node references plus its tag map.
#[derive(Debug, Clone, PartialEq)]
pub struct OsmWay {
    pub id: i64,
    pub node_refs: Vec<i64>,
    pub tags: BTreeMap<String, String>,
}

/// A relation member reference (retained, unused for geometry).
#[derive(Debug, Clone, PartialEq)]
pub struct OsmMember {
    pub member_type: String,
    pub reference: i64,
    pub role: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OsmRelation {
    pub id: i64,
    pub members: Vec<OsmMember>,
    pub tags: BTreeMap<String, String>,
}

/// Parsed OSM extract. Every node referenced by a way is guaranteed present.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OsmDocument {
    /// node id -> (longitude, latitude) in degrees
    pub nodes: BTreeMap<i64, [f64; 2]>,
    pub ways: Vec<OsmWay>,
    pub relations: Vec<OsmRelation>,
}

/// A named building perimeter in WGS84 degrees. The ring is open (the first
/// vertex is not repeated) and simple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoFootprint {
    pub name: String,
    /// ordered (longitude, latitude) vertices, >= 3
    pub ring: Vec<[f64; 2]>,
}

pub fn parse_osm(xml_text: &str) -> Result<OsmDocument, OsmError> {
    let tree =
        roxmltree::Document::parse(xml_text).map_err(|e| OsmError::MalformedXml(e.to_string()))?;
    let mut doc = OsmDocument::default();

    for el in tree.root_element().children().filter(|n| n.is_element()) {
        match el.tag_name().name() {
            "node" => {
                let id = attr_i64(&el, "node", "id")?;
                let lon = attr_f64(&el, "node", "lon")?;
                let lat = attr_f64(&el, "node", "lat")?;
                if !(lon.is_finite() && (-180.0..=180.0).contains(&lon))
                    || !(lat.is_finite() && lat.abs() < 90.0)
                {
                    return Err(OsmError::CoordinateOutOfRange {
                        node_id: id,
                        lon,
                        lat,
                    });
                }
                doc.nodes.insert(id, [lon, lat]);
            }
            "way" => {
                let id = attr_i64(&el, "way", "id")?;
                let mut node_refs = Vec::new();
                let mut tags = BTreeMap::new();
                for child in el.children().filter(|n| n.is_element()) {
                    match child.tag_name().name() {
                        "nd" => node_refs.push(attr_i64(&child, "nd", "ref")?),
                        "tag" => {
                            let (k, v) = tag_kv(&child)?;
                            tags.insert(k, v);
                        }
                        _ => {}
                    }
                }
                doc.ways.push(OsmWay {
                    id,
                    node_refs,
                    tags,
                });
            }
            "relation" => {
                let id = attr_i64(&el, "relation", "id")?;
                let mut members = Vec::new();
                let mut tags = BTreeMap::new();
                for child in el.children().filter(|n| n.is_element()) {
                    match child.tag_name().name() {
                        "member" => members.push(OsmMember {
                            member_type: child.attribute("type").unwrap_or("").to_string(),
                            reference: attr_i64(&child, "member", "ref")?,
                            role: child.attribute("role").unwrap_or("").to_string(),
                        }),
                        "tag" => {
                            let (k, v) = tag_kv(&child)?;
                            tags.insert(k, v);
                        }
                        _ => {}
                    }
                }
                doc.relations.push(OsmRelation { id, members, tags });
            }
            _ => {}
        }
    }

    for way in &doc.ways {
        for &r in &way.node_refs {
            if !doc.nodes.contains_key(&r) {
                return Err(OsmError::DanglingReference {
                    way_id: way.id,
                    node_id: r,
                });
            }
        }
    }
    Ok(doc)
}

fn attr_i64(
    el: &roxmltree::Node,
    element: &'static str,
    attribute: &'static str,
) -> Result<i64, OsmError> {
    el.attribute(attribute)
        .and_then(|v| v.parse().ok())
        .ok_or(OsmError::BadAttribute { element, attribute })
}

fn attr_f64(
    el: &roxmltree::Node,
    element: &'static str,
    attribute: &'static str,
) -> Result<f64, OsmError> {
    el.attribute(attribute)
        .and_then(|v| v.parse().ok())
        .ok_or(OsmError::BadAttribute { element, attribute })
}

fn tag_kv(el: &roxmltree::Node) -> Result<(String, String), OsmError> {
    let k = el
        .attribute("k")
        .ok_or(OsmError::BadAttribute {
            element: "tag",
            attribute: "k",
        })?
        .to_string();
    let v = el
        .attribute("v")
        .ok_or(OsmError::BadAttribute {
            element: "tag",
            attribute: "v",
        })?
        .to_string();
    Ok((k, v))
}

/// Which ways become footprints.
#[derive(Debug, Clone)]
pub enum FootprintFilter {
    /// Every way carrying a `building` tag, any value.
    Buildings,
    /// Ways whose `name` tag equals one of the requested names
    /// (exact, case-sensitive).
    Names(Vec<String>),
}

impl FootprintFilter {
    fn matches_tags(&self, tags: &BTreeMap<String, String>) -> bool {
        match self {
            FootprintFilter::Buildings => tags.contains_key("building"),
            FootprintFilter::Names(names) => tags
                .get("name")
                .map(|n| names.iter().any(|w| w == n))
                .unwrap_or(false),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExtractWarning {
    /// A matching way was not closed (first ref != last ref); the ring is
    /// treated as implicitly closed.
    AutoClosedWay { way_id: i64 },
    /// A matching relation (e.g. a multipolygon) was skipped; only way-level
    /// footprints are supported.
    SkippedRelation { relation_id: i64 },
}

impl std::fmt::Display for ExtractWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtractWarning::AutoClosedWay { way_id } => {
                write!(
                    f,
                    "way {way_id} is not closed; treating ring as implicitly closed"
                )
            }
            ExtractWarning::SkippedRelation { relation_id } => {
                write!(f, "relation {relation_id} matches the filter but relation geometry is unsupported; skipped")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct FootprintExtraction {
    pub footprints: Vec<GeoFootprint>,
    pub warnings: Vec<ExtractWarning>,
}

/// Materializes footprints for every way matching the filter, in ascending
/// way-id order. Closed ways have the duplicate terminal vertex dropped;
/// unclosed ways are auto-closed with a warning.
pub fn extract_footprints(
    doc: &OsmDocument,
    filter: &FootprintFilter,
) -> Result<FootprintExtraction, OsmError> {
    let mut warnings = Vec::new();
    let mut footprints = Vec::new();

    let mut ways: Vec<&OsmWay> = doc
        .ways
        .iter()
        .filter(|w| filter.matches_tags(&w.tags))
        .collect();
    ways.sort_by_key(|w| w.id);

    for way in ways {
        let mut refs = way.node_refs.clone();
        if refs.len() >= 2 && refs.first() == refs.last() {
            refs.pop();
        } else {
            warnings.push(ExtractWarning::AutoClosedWay { way_id: way.id });
        }
        let mut ring: Vec<[f64; 2]> = Vec::with_capacity(refs.len());
        for r in refs {
            let v = doc.nodes[&r];
            if ring.last() != Some(&v) {
                ring.push(v);
            }
        }
        while ring.len() >= 2 && ring.first() == ring.last() {
            ring.pop();
        }
        if ring.len() < 3 {
            return Err(OsmError::DegenerateFootprint { way_id: way.id });
        }
        if crate::geometry::find_self_intersection(&ring).is_some() {
            return Err(OsmError::SelfIntersectingWay { way_id: way.id });
        }
        let name = way
            .tags
            .get("name")
            .cloned()
            .unwrap_or_else(|| format!("way/{}", way.id));
        footprints.push(GeoFootprint { name, ring });
    }

    for rel in &doc.relations {
        if filter.matches_tags(&rel.tags) {
            warnings.push(ExtractWarning::SkippedRelation {
                relation_id: rel.id,
            });
        }
    }

    Ok(FootprintExtraction {
        footprints,
        warnings,
    })
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Serializes a document back to OSM XML. Nodes are emitted in id order;
/// way and relation order is preserved. Re-parsing yields an equal document.
pub fn write_osm_xml(doc: &OsmDocument) -> String {
    let mut out =
        String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<osm version=\"0.6\">\n");
    for (id, [lon, lat]) in &doc.nodes {
        let _ = writeln!(out, "  <node id=\"{id}\" lon=\"{lon}\" lat=\"{lat}\"/>");
    }
    for way in &doc.ways {
        let _ = writeln!(out, "  <way id=\"{}\">", way.id);
        for r in &way.node_refs {
            let _ = writeln!(out, "    <nd ref=\"{r}\"/>");
        }
        for (k, v) in &way.tags {
            let _ = writeln!(
                out,
                "    <tag k=\"{}\" v=\"{}\"/>",
                escape_xml(k),
                escape_xml(v)
            );
        }
        out.push_str("  </way>\n");
    }
    for rel in &doc.relations {
        let _ = writeln!(out, "  <relation id=\"{}\">", rel.id);
        for m in &rel.members {
            let _ = writeln!(
                out,
                "    <member type=\"{}\" ref=\"{}\" role=\"{}\"/>",
                escape_xml(&m.member_type),
                m.reference,
                escape_xml(&m.role)
            );
        }
        for (k, v) in &rel.tags {
            let _ = writeln!(
                out,
                "    <tag k=\"{}\" v=\"{}\"/>",
                escape_xml(k),
                escape_xml(v)
            );
        }
        out.push_str("  </relation>\n");
    }
    out.push_str("</osm>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE_FIXTURE: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<osm version="0.6">
  <node id="1" lon="-6.2550" lat="53.3430"/>
  <node id="2" lon="-6.2545" lat="53.3430"/>
  <node id="3" lon="-6.2545" lat="53.3435"/>
  <node id="4" lon="-6.2550" lat="53.3435"/>
  <way id="100">
    <nd ref="1"/>
    <nd ref="2"/>
    <nd ref="3"/>
    <nd ref="4"/>
    <nd ref="1"/>
    <tag k="building" v="yes"/>
    <tag k="name" v="Museum Building"/>
  </way>
</osm>
"#;

    #[test]
    fn parse_square_fixture() {
        let doc = parse_osm(SQUARE_FIXTURE).unwrap();
        assert_eq!(doc.nodes.len(), 4);
        assert_eq!(doc.ways.len(), 1);
        assert_eq!(doc.relations.len(), 0);
        assert_eq!(doc.ways[0].tags["building"], "yes");
    }

    #[test]
    fn parse_empty_document() {
        let doc = parse_osm("<osm></osm>").unwrap();
        assert_eq!(doc.nodes.len(), 0);
        assert_eq!(doc.ways.len(), 0);
        assert_eq!(doc.relations.len(), 0);
    }

    #[test]
    fn parse_rejects_dangling_reference() {
        let xml = r#"<osm>
  <node id="1" lon="0" lat="0"/>
  <way id="7"><nd ref="1"/><nd ref="99"/></way>
</osm>"#;
        match parse_osm(xml) {
            Err(OsmError::DanglingReference { way_id, node_id }) => {
                assert_eq!(way_id, 7);
                assert_eq!(node_id, 99);
            }
            other => panic!("expected DanglingReference, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_malformed_xml() {
        assert!(matches!(
            parse_osm("<osm><node id=\"1\""),
            Err(OsmError::MalformedXml(_))
        ));
    }

    #[test]
    fn closed_way_drops_duplicate_terminal_vertex() {
        let doc = parse_osm(SQUARE_FIXTURE).unwrap();
        let out = extract_footprints(&doc, &FootprintFilter::Buildings).unwrap();
        assert_eq!(out.footprints.len(), 1);
        assert_eq!(out.footprints[0].ring.len(), 4);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn name_filter_selects_exactly_matching_way() {
        let xml = r#"<osm>
  <node id="1" lon="0.000" lat="0.000"/>
  <node id="2" lon="0.001" lat="0.000"/>
  <node id="3" lon="0.001" lat="0.001"/>
  <node id="4" lon="0.000" lat="0.001"/>
  <node id="11" lon="0.010" lat="0.010"/>
  <node id="12" lon="0.011" lat="0.010"/>
  <node id="13" lon="0.011" lat="0.011"/>
  <way id="1"><nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="4"/><nd ref="1"/><tag k="name" v="Museum Building"/></way>
  <way id="2"><nd ref="11"/><nd ref="12"/><nd ref="13"/><nd ref="11"/><tag k="name" v="Chapel"/></way>
</osm>"#;
        let doc = parse_osm(xml).unwrap();
        let out = extract_footprints(
            &doc,
            &FootprintFilter::Names(vec!["Museum Building".to_string()]),
        )
        .unwrap();
        assert_eq!(out.footprints.len(), 1);
        assert_eq!(out.footprints[0].name, "Museum Building");
    }

    #[test]
    fn two_distinct_nodes_is_degenerate() {
        let xml = r#"<osm>
  <node id="1" lon="0" lat="0"/>
  <node id="2" lon="0.001" lat="0"/>
  <way id="5"><nd ref="1"/><nd ref="2"/><nd ref="1"/><tag k="building" v="yes"/></way>
</osm>"#;
        let doc = parse_osm(xml).unwrap();
        assert!(matches!(
            extract_footprints(&doc, &FootprintFilter::Buildings),
            Err(OsmError::DegenerateFootprint { way_id: 5 })
        ));
    }

    #[test]
    fn self_intersecting_way_rejected() {
        // asymmetric bowtie: edges cross away from any shared vertex
        let xml = r#"<osm>
  <node id="1" lon="0" lat="0"/>
  <node id="2" lon="0.004" lat="0"/>
  <node id="3" lon="0.001" lat="0.002"/>
  <node id="4" lon="0.003" lat="0.002"/>
  <way id="6"><nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="4"/><nd ref="1"/><tag k="building" v="yes"/></way>
</osm>"#;
        let doc = parse_osm(xml).unwrap();
        assert!(matches!(
            extract_footprints(&doc, &FootprintFilter::Buildings),
            Err(OsmError::SelfIntersectingWay { way_id: 6 })
        ));
    }

    #[test]
    fn unclosed_way_warns_and_auto_closes() {
        let xml = r#"<osm>
  <node id="1" lon="0" lat="0"/>
  <node id="2" lon="0.001" lat="0"/>
  <node id="3" lon="0.001" lat="0.001"/>
  <way id="5"><nd ref="1"/><nd ref="2"/><nd ref="3"/><tag k="building" v="yes"/></way>
</osm>"#;
        let doc = parse_osm(xml).unwrap();
        let out = extract_footprints(&doc, &FootprintFilter::Buildings).unwrap();
        assert_eq!(out.footprints.len(), 1);
        assert_eq!(out.footprints[0].ring.len(), 3);
        assert_eq!(
            out.warnings,
            vec![ExtractWarning::AutoClosedWay { way_id: 5 }]
        );
    }

    #[test]
    fn matching_relation_is_skipped_with_warning() {
        let xml = r#"<osm>
  <node id="1" lon="0" lat="0"/>
  <node id="2" lon="0.001" lat="0"/>
  <node id="3" lon="0.001" lat="0.001"/>
  <way id="5"><nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="1"/><tag k="building" v="yes"/></way>
  <relation id="9">
    <member type="way" ref="5" role="outer"/>
    <tag k="type" v="multipolygon"/>
    <tag k="building" v="yes"/>
  </relation>
</osm>"#;
        let doc = parse_osm(xml).unwrap();
        let out = extract_footprints(&doc, &FootprintFilter::Buildings).unwrap();
        assert_eq!(out.footprints.len(), 1);
        assert_eq!(
            out.warnings,
            vec![ExtractWarning::SkippedRelation { relation_id: 9 }]
        );
    }

    #[test]
    fn xml_round_trip_preserves_document() {
        let xml = "<osm>
  <node id=\"1\" lon=\"-6.25532\" lat=\"53.3438\"/>
  <node id=\"2\" lon=\"0.0010000000000000002\" lat=\"0\"/>
  <node id=\"3\" lon=\"0.001\" lat=\"0.001\"/>
  <way id=\"5\"><nd ref=\"1\"/><nd ref=\"2\"/><nd ref=\"3\"/><nd ref=\"1\"/><tag k=\"name\" v=\"O'Reilly &amp; Sons &#233;\"/></way>
  <relation id=\"9\"><member type=\"way\" ref=\"5\" role=\"outer\"/><tag k=\"type\" v=\"multipolygon\"/></relation>
</osm>";
        let doc = parse_osm(xml).unwrap();
        let doc2 = parse_osm(&write_osm_xml(&doc)).unwrap();
        assert_eq!(doc, doc2);
    }

    #[test]
    fn extraction_independent_of_element_order() {
        let forward = parse_osm(SQUARE_FIXTURE).unwrap();
        let shuffled = r#"<osm>
  <way id="100">
    <nd ref="1"/>
    <nd ref="2"/>
    <nd ref="3"/>
    <nd ref="4"/>
    <nd ref="1"/>
    <tag k="building" v="yes"/>
    <tag k="name" v="Museum Building"/>
  </way>
  <node id="3" lon="-6.2545" lat="53.3435"/>
  <node id="1" lon="-6.2550" lat="53.3430"/>
  <node id="4" lon="-6.2550" lat="53.3435"/>
  <node id="2" lon="-6.2545" lat="53.3430"/>
</osm>"#;
        let reordered = parse_osm(shuffled).unwrap();
        let a = extract_footprints(&forward, &FootprintFilter::Buildings).unwrap();
        let b = extract_footprints(&reordered, &FootprintFilter::Buildings).unwrap();
        assert_eq!(a.footprints, b.footprints);
    }
}
