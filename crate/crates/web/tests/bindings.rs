use serde_json::Value;
use superspin_web::{mu_table_json, spectrum_json, wavefunction_json};

// dipole, k = 1: α_{1/2} = -i, α_{-1/2} = i
const DIPOLE: [f64; 4] = [0.0, -1.0, 0.0, 1.0];

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn mu_table_of_dipole() {
    let v = parse(mu_table_json(1, &DIPOLE, 0.0));
    assert_eq!(v["two_k"], serde_json::json!([1, -1]));
    assert_eq!(v["entries"][0][1], serde_json::json!([0.0, -1.0]));
    assert_eq!(v["entries"][1][0], serde_json::json!([0.0, 1.0]));
    assert_eq!(v["mu_squared_diagonal"], serde_json::json!([1.0, 1.0]));
}

#[test]
fn rejects_bad_coefficients() {
    assert!(mu_table_json(1, &[1.0, 0.0], 0.0).is_err());
    assert!(mu_table_json(1, &[1.0, 0.0, 2.0, 0.0], 0.0).unwrap_err().contains("hermiticity"));
    assert!(mu_table_json(-1, &[], 0.0).is_err());
    assert!(spectrum_json(1, &DIPOLE, 0.0, 1, 60.0, 1000).is_err());
    assert!(spectrum_json(1, &DIPOLE, 1.0, 2, 60.0, 1000).is_err());
}

#[test]
fn spectrum_of_lowest_sector() {
    let v = parse(spectrum_json(1, &DIPOLE, 1.0, 1, 60.0, 3000));
    let levels = v.as_array().unwrap();
    assert!(levels.len() >= 3);
    let e0 = levels[0]["energy"].as_f64().unwrap();
    assert!((e0 + 0.5).abs() < 5e-4, "{e0}");
    assert_eq!(levels[0]["two_j"], 1);
    assert!(levels.iter().all(|l| l["rel_err"].as_f64().unwrap() < 1e-3));
}

#[test]
fn wavefunction_is_thinned_and_normalized() {
    let v = parse(wavefunction_json(1, &DIPOLE, 1.0, 1, 0, 60.0, 3000));
    let r = v["r"].as_array().unwrap();
    assert!(r.len() <= 400 && r.len() >= 300);
    let channels = v["channels"].as_array().unwrap();
    assert_eq!(channels.len(), 2);
    // thinned samples still integrate to about one
    let dr = r[1].as_f64().unwrap() - r[0].as_f64().unwrap();
    let total: f64 = channels
        .iter()
        .flat_map(|c| c["density"].as_array().unwrap().iter().map(|d| d.as_f64().unwrap()))
        .sum::<f64>()
        * dr;
    assert!((total - 1.0).abs() < 0.02, "{total}");
    assert!(wavefunction_json(1, &DIPOLE, 1.0, 1, 99, 60.0, 3000).is_err());
}
