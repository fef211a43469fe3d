use lrd_core::fit::{self, DecayModel, FitOptions, ModelKind};
use lrd_core::hurst::{self, RsPoint};
use lrd_core::ingest::{self, ChannelTrace, GapPolicy, LinkDescriptor, NodePosition};
use proptest::prelude::*;

fn link() -> LinkDescriptor {
    LinkDescriptor::new(2, NodePosition::LH, 5, NodePosition::LW).unwrap()
}

fn reload(trace: &ChannelTrace, rate: f64) -> ChannelTrace {
    let mut buf = Vec::new();
    trace.write_csv(&mut buf).unwrap();
    let parsed = ingest::parse_trace(buf.as_slice(), rate, "mem.csv".as_ref()).unwrap();
    ChannelTrace::with_missing(link(), rate, parsed.samples, parsed.missing).unwrap()
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

fn policy() -> impl Strategy<Value = GapPolicy> {
    prop_oneof![
        Just(GapPolicy::Drop),
        Just(GapPolicy::HoldLast),
        Just(GapPolicy::LinearInterpolate),
    ]
}

proptest! {
    #[test]
    fn csv_round_trip_is_bit_identical(
        samples in prop::collection::vec(-150.0f64..0.0, 1..300),
        rate in prop_oneof![Just(20.0), Just(10.0), Just(100.0)],
    ) {
        let trace = ChannelTrace::new(link(), rate, samples).unwrap();
        let back = reload(&trace, rate);
        prop_assert_eq!(bits(back.samples()), bits(trace.samples()));
        prop_assert_eq!(back.missing_mask(), trace.missing_mask());
    }

    #[test]
    fn csv_round_trip_keeps_interior_gaps(
        samples in prop::collection::vec(-150.0f64..0.0, 3..200),
        gaps in prop::collection::vec(any::<bool>(), 200),
    ) {
        let n = samples.len();
        let mut missing: Vec<bool> = gaps[..n].to_vec();
        missing[0] = false;
        missing[n - 1] = false;
        let trace = ChannelTrace::with_missing(link(), 20.0, samples, missing).unwrap();
        let back = reload(&trace, 20.0);
        prop_assert_eq!(back.missing_mask(), trace.missing_mask());
        prop_assert_eq!(bits(back.samples()), bits(trace.samples()));
    }

    #[test]
    fn gap_policy_is_identity_on_gap_free_traces(
        samples in prop::collection::vec(-150.0f64..0.0, 1..200),
        policy in policy(),
    ) {
        let trace = ChannelTrace::new(link(), 20.0, samples).unwrap();
        let once = ingest::apply_gap_policy(&trace, policy).unwrap();
        prop_assert_eq!(bits(once.samples()), bits(trace.samples()));
        let twice = ingest::apply_gap_policy(&once, policy).unwrap();
        prop_assert_eq!(bits(twice.samples()), bits(once.samples()));
    }

    #[test]
    fn gap_policy_output_is_gap_free_and_stable(
        samples in prop::collection::vec(-150.0f64..0.0, 2..200),
        gaps in prop::collection::vec(any::<bool>(), 200),
        policy in policy(),
    ) {
        let n = samples.len();
        let mut missing = gaps[..n].to_vec();
        missing[n / 2] = false;
        let trace = ChannelTrace::with_missing(link(), 20.0, samples, missing).unwrap();
        let once = ingest::apply_gap_policy(&trace, policy).unwrap();
        prop_assert!(once.is_gap_free());
        let twice = ingest::apply_gap_policy(&once, policy).unwrap();
        prop_assert_eq!(bits(twice.samples()), bits(once.samples()));
    }

    #[test]
    fn fit_never_worse_than_start_and_monotone(
        a in 0.2f64..2.0,
        b in -1.0f64..-0.01,
        noise in prop::collection::vec(-0.02f64..0.02, 40),
        power in any::<bool>(),
    ) {
        let truth = if power { DecayModel::power(a, b) } else { DecayModel::exponential(a, b / 10.0) };
        let pts: Vec<(f64, f64)> = noise
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let x = (i + 1) as f64;
                (x, truth.eval(x) + e)
            })
            .collect();
        let kinds = [ModelKind::Power, ModelKind::Exponential];
        for kind in kinds {
            let full = fit::fit_points(&pts, kind, &FitOptions::default()).unwrap();
            prop_assert!(full.sse <= full.initial_sse);
            let mut previous = full.initial_sse;
            for k in 1..=full.iterations.min(30) {
                let opts = FitOptions { max_iterations: k, ..FitOptions::default() };
                let partial = fit::fit_points(&pts, kind, &opts).unwrap();
                prop_assert!(partial.sse <= previous);
                previous = partial.sse;
            }
        }
    }

    #[test]
    fn regression_slope_ignores_rs_scale(
        h in 0.1f64..0.95,
        c in 0.01f64..100.0,
        jitter in prop::collection::vec(0.9f64..1.1, 6),
    ) {
        let points: Vec<RsPoint> = (0..6)
            .map(|k| {
                let span = 1024usize >> k;
                RsPoint { span, mean_rs: jitter[k] * (span as f64).powf(h), window_count: 1 << k }
            })
            .collect();
        let scaled: Vec<RsPoint> = points
            .iter()
            .map(|p| RsPoint { mean_rs: c * p.mean_rs, ..*p })
            .collect();
        let base = hurst::hurst_regress(&points).unwrap();
        let moved = hurst::hurst_regress(&scaled).unwrap();
        prop_assert!((base.h - moved.h).abs() < 1e-9);
        prop_assert!((moved.intercept - base.intercept - c.ln()).abs() < 1e-9);
    }
}
