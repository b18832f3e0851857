//! Writes a harmonic map to the JSON map format and reads it back; a
//! non-harmonic component is rejected with the offending coefficient.

use qharm::polyharm::{random_harmonic_map, HarmonicMap};

fn main() -> qharm::Result<()> {
    let u = random_harmonic_map(2, 2, 3)?;
    let json = u.to_json_string()?;
    println!("{json}");
    let back = HarmonicMap::from_json_str(&json)?;
    assert_eq!(back, u);

    let not_harmonic = r#"{"n": 2, "components": [
        [{"exps": [2, 0], "num": 1, "den": 1}],
        [{"exps": [0, 1], "num": 1, "den": 1}]
    ]}"#;
    match HarmonicMap::from_json_str(not_harmonic) {
        Ok(_) => unreachable!("x1^2 is not harmonic"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
