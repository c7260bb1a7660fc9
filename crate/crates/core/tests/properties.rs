use polarbp::channel::ChannelParams;
use polarbp::decoder::DecoderConfig;
use polarbp::graph::syndrome;
use polarbp::polar::construct_frozen_set;
use polarbp::reference::{sc_decode, scl_decode};
use polarbp::sim::{
    decode_frame, generate_frame, run_monte_carlo, CodeContext, DecoderKind, DecoderSelection, SimOptions,
    StopRule,
};

fn ctx(n: usize, k: usize) -> CodeContext {
    CodeContext::new(construct_frozen_set(n, k, 1.0).unwrap(), false)
}

#[test]
fn scl_fer_non_increasing_in_list_size() {
    let c = ctx(64, 32);
    let ch = ChannelParams::new(2.0, c.spec.rate()).unwrap();
    let frames: Vec<_> = (0..1500).map(|i| generate_frame(&c, &ch, 5, i, false).unwrap()).collect();
    let mut previous = usize::MAX;
    for l in [1, 2, 4, 8] {
        let errors = frames
            .iter()
            .filter(|f| scl_decode(&c.spec, &f.llr, l).unwrap() != f.codeword)
            .count();
        assert!(errors <= previous, "L={l}: {errors} > {previous}");
        previous = errors;
    }
}

#[test]
fn scl_single_path_is_sc() {
    let c = ctx(128, 64);
    let ch = ChannelParams::new(1.5, c.spec.rate()).unwrap();
    for i in 0..200 {
        let f = generate_frame(&c, &ch, 9, i, false).unwrap();
        assert_eq!(scl_decode(&c.spec, &f.llr, 1).unwrap(), sc_decode(&c.spec, &f.llr).unwrap());
    }
}

#[test]
fn ber_non_increasing_in_snr() {
    let c = ctx(64, 32);
    for kind in [DecoderKind::Sc, DecoderKind::Spa] {
        let sel = DecoderSelection::new(kind, DecoderConfig::default());
        let mut previous = f64::INFINITY;
        for snr in [0.0, 2.0, 4.0] {
            let ch = ChannelParams::new(snr, c.spec.rate()).unwrap();
            let s = run_monte_carlo(&c, &sel, &ch, &StopRule::frames(1000), 3, &SimOptions::default()).unwrap();
            assert!(s.ber() <= previous, "{kind} at {snr} dB: {} > {previous}", s.ber());
            previous = s.ber();
        }
    }
}

#[test]
fn decoder_outputs_are_codewords_when_reported_converged() {
    let c = ctx(64, 32);
    let ch = ChannelParams::new(3.0, c.spec.rate()).unwrap();
    for kind in [
        DecoderKind::Spa,
        DecoderKind::Arsbp,
        DecoderKind::Nwrbp,
        DecoderKind::Sc,
        DecoderKind::Scl { list_size: 4 },
        DecoderKind::DenseBp,
    ] {
        let cfg = if kind == DecoderKind::DenseBp {
            DecoderConfig::default().with_t_max(60)
        } else {
            DecoderConfig::default()
        };
        let sel = DecoderSelection::new(kind, cfg);
        for i in 0..100 {
            let f = generate_frame(&c, &ch, 2, i, false).unwrap();
            let out = decode_frame(&c, &sel, &f.llr).unwrap();
            if out.converged {
                assert!(syndrome(&c.h, &out.codeword).unwrap(), "{kind} frame {i}");
            }
            assert!(out.iterations >= 1);
        }
    }
}

#[test]
fn frames_do_not_depend_on_decoder_or_order() {
    let c = ctx(32, 16);
    let ch = ChannelParams::new(1.0, c.spec.rate()).unwrap();
    let forward: Vec<_> = (0..20).map(|i| generate_frame(&c, &ch, 11, i, false).unwrap()).collect();
    for i in (0..20).rev() {
        assert_eq!(generate_frame(&c, &ch, 11, i, false).unwrap(), forward[i as usize]);
    }
    assert_ne!(forward[0], forward[1]);
}

#[test]
fn workers_do_not_change_statistics() {
    let c = ctx(64, 32);
    let ch = ChannelParams::new(2.0, c.spec.rate()).unwrap();
    let sel = DecoderSelection::new(DecoderKind::Arsbp, DecoderConfig::default());
    let stop = StopRule {
        max_frames: Some(700),
        target_frame_errors: Some(90),
    };
    let one = run_monte_carlo(&c, &sel, &ch, &stop, 4, &SimOptions::default()).unwrap();
    let four = run_monte_carlo(&c, &sel, &ch, &stop, 4, &SimOptions { workers: 4, ..Default::default() }).unwrap();
    assert_eq!(one, four);
}
