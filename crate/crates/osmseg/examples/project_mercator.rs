//! Convert a WGS84 coordinate to ellipsoidal Mercator meters and back.
//!
//! ```bash
//! cargo run --example project_mercator
//! ```

use osmseg::mercator::{mercator_to_wgs84, wgs84_to_mercator, GeoCoord};

fn main() {
    // Dublin city centre
    let geo = GeoCoord::new(-6.25532, 53.34380).unwrap();
    let m = wgs84_to_mercator(geo);
    println!(
        "({}, {}) deg -> ({:.4}, {:.4}) m",
        geo.longitude(),
        geo.latitude(),
        m.x,
        m.y
    );

    let back = mercator_to_wgs84(m).unwrap();
    println!(
        "inverse          -> ({:.10}, {:.10}) deg",
        back.longitude(),
        back.latitude()
    );
    let again = wgs84_to_mercator(back);
    println!(
        "round-trip error:   ({:.2e}, {:.2e}) m",
        (again.x - m.x).abs(),
        (again.y - m.y).abs()
    );

    // out-of-range latitudes are rejected rather than producing infinities
    match GeoCoord::new(0.0, 89.9) {
        Err(e) => println!("89.9 deg latitude: {e}"),
        Ok(_) => unreachable!(),
    }
}
