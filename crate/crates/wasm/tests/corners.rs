//! The demo page exposes bounded sliders; sweep their corner combinations
//! so no reachable setting can throw or stall once compiled for the web.

use qbm_wasm::{attenuation_curve, interference_curve, packet_width_curve};

#[test]
fn every_slider_corner_yields_a_finite_curve() {
    for &sigma in &[0.2, 3.0] {
        for &gamma in &[0.0, 2.0] {
            for &temp in &[0.0, 20.0] {
                let curve = packet_width_curve(sigma, 0.0, gamma, temp, 10.0, 21)
                    .unwrap_or_else(|e| panic!("spread sigma={sigma} gamma={gamma} kT={temp}: {e}"));
                assert!(curve.iter().all(|v| v.is_finite()));
            }
        }
    }
    for &d in &[2.0, 20.0] {
        for &sigma in &[0.2, 3.0] {
            for &gamma in &[0.0, 2.0] {
                for &temp in &[0.0, 50.0] {
                    let curve = attenuation_curve(d, sigma, 0.0, gamma, temp, 1.0, 11)
                        .unwrap_or_else(|e| {
                            panic!("attenuation d={d} sigma={sigma} gamma={gamma} kT={temp}: {e}")
                        });
                    assert!(curve.iter().all(|v| v.is_finite()));
                }
            }
        }
    }
    for &d in &[2.0, 12.0] {
        for &sigma in &[0.2, 2.0] {
            for &t in &[0.0, 8.0] {
                for &gamma in &[0.0, 1.0] {
                    for &temp in &[0.0, 2.0] {
                        let curve =
                            interference_curve(d, sigma, 0.0, gamma, temp, t, 14.0, 41)
                                .unwrap_or_else(|e| {
                                    panic!(
                                        "profile d={d} sigma={sigma} t={t} gamma={gamma} kT={temp}: {e}"
                                    )
                                });
                        assert!(curve.iter().all(|v| v.is_finite()));
                    }
                }
            }
        }
    }
}
