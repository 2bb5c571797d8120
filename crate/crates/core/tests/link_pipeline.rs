//! Full-pipeline statistical checks: measured BER through the complete
//! transmit/channel/receive chain against closed-form references.

use linksim::channel::{ChannelFamily, ChannelSpec};
use linksim::harness::{run_ber_point, run_ber_point_with_block, theoretical_ber, StoppingRule};
use linksim::link::{constellation_capture, ConstellationSpec, DiffAxis, LinkConfig};
use linksim::mapping::{BitMapping, Scheme};
use linksim::ofdm::OfdmConfig;

fn link(scheme: Scheme, order: usize, channel: ChannelSpec, ebn0_db: f64) -> LinkConfig {
    LinkConfig {
        constellation: ConstellationSpec::new(scheme, order, BitMapping::Gray),
        ofdm: OfdmConfig::new(64, 0, 2e-6).unwrap(),
        channel,
        ebn0_db,
        count_cp_energy: true,
        diff_axis: DiffAxis::Time,
    }
}

#[test]
fn coherent_bpsk_over_awgn_matches_q_function() {
    let rule = StoppingRule {
        min_errors: 600,
        max_bits: 50_000_000,
    };
    for ebn0_db in [1.0, 4.0] {
        let cfg = link(Scheme::Psk, 2, ChannelSpec::awgn(), ebn0_db);
        let r = run_ber_point(&cfg, &rule, 0x01).unwrap();
        let expect = theoretical_ber(Scheme::Psk, 2, ChannelFamily::Awgn, ebn0_db)
            .unwrap()
            .value();
        assert!(
            (r.ber - expect).abs() < 3.0 * r.std_error,
            "BPSK at {ebn0_db} dB: measured {} ({} errors), exact {expect}",
            r.ber,
            r.bit_errors
        );
    }
}

#[test]
fn bpsk_with_cyclic_prefix_pays_the_prefix_energy() {
    // With cp = 16 on N = 64 and prefix energy charged to the bits, the
    // effective per-bit SNR drops by factor 0.8, i.e. the curve shifts by
    // ~0.97 dB: measured BER must match Q(sqrt(2 * 0.8 * Eb/N0)).
    let rule = StoppingRule {
        min_errors: 600,
        max_bits: 50_000_000,
    };
    let mut cfg = link(Scheme::Psk, 2, ChannelSpec::awgn(), 4.0);
    cfg.ofdm = OfdmConfig::new(64, 16, 2e-6).unwrap();
    let r = run_ber_point(&cfg, &rule, 0x02).unwrap();
    let gb = linksim::math::db_to_linear(4.0) * 0.8;
    let expect = linksim::math::q_function((2.0 * gb).sqrt());
    assert!(
        (r.ber - expect).abs() < 3.0 * r.std_error,
        "measured {} vs prefix-derated exact {expect}",
        r.ber
    );
    // And it must not match the prefix-free curve, which at this Eb/N0
    // differs by far more than the Monte Carlo error.
    let free = theoretical_ber(Scheme::Psk, 2, ChannelFamily::Awgn, 4.0)
        .unwrap()
        .value();
    assert!((r.ber - free).abs() > 6.0 * r.std_error);
}

#[test]
fn dbpsk_over_awgn_matches_exponential_form_on_both_axes() {
    let rule = StoppingRule {
        min_errors: 600,
        max_bits: 50_000_000,
    };
    for axis in [DiffAxis::Time, DiffAxis::Frequency] {
        let mut cfg = link(Scheme::Dpsk, 2, ChannelSpec::awgn(), 5.0);
        cfg.diff_axis = axis;
        let r = run_ber_point(&cfg, &rule, 0x03).unwrap();
        let expect = theoretical_ber(Scheme::Dpsk, 2, ChannelFamily::Awgn, 5.0)
            .unwrap()
            .value();
        assert!(
            (r.ber - expect).abs() < 3.0 * r.std_error,
            "DBPSK ({axis:?}) at 5 dB: measured {} vs exact {expect}",
            r.ber
        );
    }
}

#[test]
fn dbpsk_over_quasi_static_rayleigh_matches_closed_form() {
    // fd = 0: each block sees one static Rayleigh draw, and the exact
    // average BER is 1 / (2 (1 + Eb/N0)).  The binomial standard error
    // understates the truth here because all bits of a block share one
    // fade, so the tolerance uses the law-of-total-variance standard error
    // computed from the fade distribution itself:
    //   p(g) = exp(-gamma g) / 2,  g ~ Exp(1)
    //   E[p] = 1/(2(1+gamma)),  E[p^2] = 1/(4(1+2 gamma))
    //   Var(ber) = Var(p)/F + E[p(1-p)]/(F m)
    // with F blocks of m bits each.
    let gamma = 1.0; // 0 dB
    let m = 64u64; // one OFDM symbol of BPSK bits per block
    let blocks = 4000u64;
    let cfg = link(Scheme::Dpsk, 2, ChannelSpec::rayleigh(0.0, 2e-6), 0.0);
    let rule = StoppingRule {
        min_errors: u64::MAX,
        max_bits: blocks * m,
    };
    let r = run_ber_point_with_block(&cfg, &rule, m as usize, 0x04).unwrap();
    assert_eq!(r.bits_sent, blocks * m);

    let expect = 0.5 / (1.0 + gamma);
    let e_p = expect;
    let e_p2 = 0.25 / (1.0 + 2.0 * gamma);
    let var_p = e_p2 - e_p * e_p;
    let true_se = ((var_p + (e_p - e_p2) / m as f64) / blocks as f64).sqrt();
    assert!(
        (r.ber - expect).abs() < 3.0 * true_se,
        "DBPSK quasi-static Rayleigh at 0 dB: measured {} vs exact {expect} (se {true_se})",
        r.ber
    );
}

#[test]
fn tx_capture_is_exact_and_noiseless_rx_equals_tx() {
    let mut cfg = link(Scheme::Qam, 16, ChannelSpec::awgn(), f64::INFINITY);
    cfg.ofdm = OfdmConfig::new(64, 16, 2e-6).unwrap();
    let rx = constellation_capture(&cfg, 500, 0x05).unwrap();
    let c = cfg.constellation.build().unwrap();
    // Without noise every decision variable is a constellation point.
    for p in &rx {
        let d = c
            .points()
            .iter()
            .map(|q| (p - q).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(d < 1e-9, "noiseless rx symbol {p} off the constellation");
    }
    // With noise the cloud spreads but stays centred: the scatter mean over
    // all 16 equiprobable points is near the origin.
    cfg.ebn0_db = 15.0;
    let rx = constellation_capture(&cfg, 4000, 0x06).unwrap();
    let mean = rx.iter().sum::<num_complex::Complex64>() / rx.len() as f64;
    assert!(mean.norm() < 0.06, "scatter mean {mean}");
}
