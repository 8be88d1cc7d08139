use newsgpt_core::evalkit::{
    aggregate_sd, classify_speed, emit_report, record_session, Accuracy, Criterion,
    CriterionRating, QARecord, SDResponse, ScaleValue, SpeedClass,
};
use newsgpt_core::gateway::WireMessage;
use proptest::prelude::*;

fn rating(criterion: Criterion, v: i64) -> CriterionRating {
    CriterionRating {
        criterion,
        value: ScaleValue::new(v).unwrap(),
    }
}

/// Table 1 rates every criterion except response time.
fn table_one() -> Vec<CriterionRating> {
    use Criterion::*;
    [
        (Relevance, 3),
        (Context, -2),
        (Bias, 2),
        (Engaging, 3),
        (Fluency, 1),
        (ErrorResilience, 3),
        (DomainOrientation, 2),
        (Satisfaction, 2),
        (Creativity, 2),
    ]
    .into_iter()
    .map(|(c, v)| rating(c, v))
    .collect()
}

#[test]
fn table_one_renders_in_fixed_order() {
    let report = emit_report(&[], &table_one(), &[]);
    assert_eq!(
        report.criteria_csv,
        "criterion,count,mean\n\
         relevance,1,3.00\n\
         context,1,-2.00\n\
         bias,1,2.00\n\
         engaging,1,3.00\n\
         fluency,1,1.00\n\
         error_resilience,1,3.00\n\
         domain_orientation,1,2.00\n\
         response_time,0,\n\
         satisfaction,1,2.00\n\
         creativity,1,2.00\n"
    );
    // Input order does not matter.
    let mut shuffled = table_one();
    shuffled.reverse();
    assert_eq!(emit_report(&[], &shuffled, &[]), report);
}

#[test]
fn table_two_speeds() {
    let speeds = [7.0, 10.0, 3.0, 9.0, 9.0, 10.0, 7.0, 6.0];
    let classes: Vec<_> = speeds.iter().map(|s| classify_speed(*s).unwrap()).collect();
    assert_eq!(classes.iter().filter(|c| **c == SpeedClass::Poor).count(), 7);
    assert_eq!(classes[2], SpeedClass::Average);
}

#[test]
fn report_from_session_log() {
    let log = vec![
        WireMessage::TextUtterance {
            text: "What is the capital of France?".into(),
        },
        WireMessage::Answer {
            text: "The capital of France is Paris".into(),
            latency_ms: 7000.0,
        },
    ];
    let mut records = record_session(&log).records;
    records[0].accuracy = Some(Accuracy::Accurate);
    let report = emit_report(&records, &[], &[]);
    assert_eq!(
        report.records_csv.lines().nth(1),
        Some("1,What is the capital of France?,The capital of France is Paris,7.00,poor,+1,")
    );
    assert!(report.summary.contains("Mean response time: 7.00 s (poor)"));
}

fn sd_strategy() -> impl Strategy<Value = Vec<SDResponse>> {
    prop::collection::vec(
        (prop::sample::select(vec!["relevance", "bias", "context", "fluency"]), -3i64..=3, 0u8..20),
        0..200,
    )
    .prop_map(|v| {
        v.into_iter()
            .map(|(item, r, who)| SDResponse {
                item: item.into(),
                rating: ScaleValue::new(r).unwrap(),
                respondent: format!("p{who}"),
            })
            .collect()
    })
}

fn record_strategy() -> impl Strategy<Value = Vec<QARecord>> {
    prop::collection::vec(
        ("[a-zA-Z ,\"?]{1,30}", "[a-zA-Z .\n]{0,30}", 0.0f64..20.0, prop::option::of(-1i64..=1)),
        0..20,
    )
    .prop_map(|v| {
        v.into_iter()
            .map(|(q, a, s, acc)| QARecord {
                question: q,
                answer: a,
                response_speed_s: s,
                accuracy: acc.map(|x| Accuracy::from_value(x).unwrap()),
                note: None,
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn speed_classes_partition_and_are_monotone(a in 0.0f64..1e6, b in 0.0f64..1e6) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (cl, ch) = (classify_speed(lo).unwrap(), classify_speed(hi).unwrap());
        prop_assert!(cl >= ch);
        let expected = if lo < 3.0 { SpeedClass::Good } else if lo <= 5.0 { SpeedClass::Average } else { SpeedClass::Poor };
        prop_assert_eq!(cl, expected);
    }

    #[test]
    fn negative_seconds_rejected(s in -1e6f64..-1e-12) {
        prop_assert!(classify_speed(s).is_err());
    }

    #[test]
    fn sd_means_match_recount_and_stay_in_scale(responses in sd_strategy()) {
        let out = aggregate_sd(&responses);
        let mut items: Vec<&str> = responses.iter().map(|r| r.item.as_str()).collect();
        items.sort();
        items.dedup();
        prop_assert_eq!(out.iter().map(|s| s.item.as_str()).collect::<Vec<_>>(), items);
        for s in &out {
            let values: Vec<f64> = responses.iter().filter(|r| r.item == s.item).map(|r| r.rating.get() as f64).collect();
            prop_assert_eq!(s.count, values.len());
            prop_assert!((s.mean - values.iter().sum::<f64>() / values.len() as f64).abs() < 1e-12);
            prop_assert!((-3.0..=3.0).contains(&s.mean));
        }
    }

    #[test]
    fn record_session_keeps_order_and_count(pairs in prop::collection::vec(("[a-z]{1,10}", 0.0f64..20_000.0), 0..30)) {
        let log: Vec<WireMessage> = pairs
            .iter()
            .enumerate()
            .flat_map(|(i, (q, ms))| {
                let question = if i % 2 == 0 {
                    WireMessage::TextUtterance { text: q.clone() }
                } else {
                    WireMessage::Transcript { text: q.clone() }
                };
                [question, WireMessage::StateUpdate { phase: newsgpt_core::gateway::SessionPhase::Thinking }, WireMessage::Answer { text: format!("a-{q}"), latency_ms: *ms }]
            })
            .collect();
        let out = record_session(&log);
        prop_assert!(out.unmatched.is_empty());
        prop_assert_eq!(out.records.len(), pairs.len());
        for (r, (q, ms)) in out.records.iter().zip(&pairs) {
            prop_assert_eq!(&r.question, q);
            prop_assert_eq!(&r.answer, &format!("a-{q}"));
            prop_assert_eq!(r.response_speed_s, ms / 1000.0);
        }
    }

    #[test]
    fn report_is_pure(records in record_strategy(), sd in sd_strategy(), raw in prop::collection::vec((0usize..10, -3i64..=3), 0..30)) {
        let ratings: Vec<_> = raw.into_iter().map(|(c, v)| rating(Criterion::ALL[c], v)).collect();
        let a = emit_report(&records, &ratings, &sd);
        let b = emit_report(&records.clone(), &ratings.clone(), &sd.clone());
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.criteria_csv.lines().count(), 11);
        let head = format!("Questions answered: {}\n", records.len());
        prop_assert!(a.summary.starts_with(&head));
    }
}
