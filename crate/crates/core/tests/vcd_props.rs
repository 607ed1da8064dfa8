mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;
use wavecheck_core::vcd::{parse_vcd, write_vcd, VcdError, WaveDb};

fn same_samples(a: &WaveDb, b: &WaveDb) {
    assert_eq!(a.num_cycles(), b.num_cycles());
    for name in a.signal_names() {
        assert_eq!(a.width(name), b.width(name), "{name}");
        for c in 0..a.num_cycles() + 2 {
            assert_eq!(
                a.sample(name, c).unwrap(),
                b.sample(name, c).unwrap(),
                "{name} @ {c}"
            );
        }
    }
}

#[test]
fn write_then_parse_preserves_samples() {
    let mut rng = common::rng(31);
    for _ in 0..100 {
        let db = common::random_db(&mut rng);
        let period = 2 * rng.gen_range(1..=10);
        let text = write_vcd(&db, period);
        let back = parse_vcd(&text, "top.clk").unwrap();
        same_samples(&db, &back);
        // One more round is a textual fixpoint.
        let again = write_vcd(&back, period);
        assert_eq!(
            write_vcd(&parse_vcd(&again, "top.clk").unwrap(), period),
            again
        );
    }
}

/// Raw VCD text with aliased id codes, vectors written without leading
/// zeros, x and z values, glitches between edges and comments.
fn random_vcd_text(rng: &mut StdRng) -> (String, Vec<String>) {
    let mut out = String::from("$date today $end\n$version fuzz $end\n$timescale 1ns $end\n");
    out.push_str("$scope module tb $end\n$var wire 1 ! clk $end\n");
    let mut vars: Vec<(String, usize, String)> = Vec::new();
    let n = rng.gen_range(1..=5);
    for k in 0..n {
        let width = rng.gen_range(1..=4);
        let id = format!("{}", (b'"' + k as u8) as char);
        let in_sub = rng.gen_ratio(1, 3);
        if in_sub {
            out.push_str("$scope module u $end\n");
        }
        let name = format!("s{k}");
        if width == 1 {
            out.push_str(&format!("$var wire 1 {id} {name} $end\n"));
        } else {
            out.push_str(&format!(
                "$var reg {width} {id} {name} [{}:0] $end\n",
                width - 1
            ));
        }
        let full = if in_sub {
            format!("tb.u.{name}")
        } else {
            format!("tb.{name}")
        };
        if in_sub {
            // An alias of the same code, visible under another name.
            if rng.gen_ratio(1, 2) {
                out.push_str(&format!("$var wire {width} {id} alias{k} $end\n"));
                vars.push((format!("tb.u.alias{k}"), width, id.clone()));
            }
            out.push_str("$upscope $end\n");
        }
        vars.push((full, width, id));
    }
    out.push_str("$upscope $end\n$enddefinitions $end\n");
    let value = |rng: &mut StdRng, width: usize, id: &str| -> String {
        let chars = ['0', '1', 'x', 'z', '1', '0'];
        if width == 1 {
            format!("{}{id}\n", chars[rng.gen_range(0..chars.len())])
        } else {
            let len = rng.gen_range(1..=width);
            let v: String = (0..len)
                .map(|_| chars[rng.gen_range(0..chars.len())])
                .collect();
            format!("b{v} {id}\n")
        }
    };
    out.push_str("#0\n$dumpvars\n0!\n");
    for (_, w, id) in &vars {
        out.push_str(&value(rng, *w, id));
    }
    out.push_str("$end\n");
    let mut t = 0u64;
    let mut clk = '0';
    for _ in 0..rng.gen_range(4..=60) {
        t += rng.gen_range(1..=7);
        out.push_str(&format!("#{t}\n"));
        if rng.gen_ratio(1, 9) {
            out.push_str("$comment glitch $end\n");
        }
        let toggle = rng.gen_ratio(2, 3);
        let mut lines = Vec::new();
        if toggle {
            clk = match clk {
                '1' => {
                    if rng.gen_ratio(1, 10) {
                        'x'
                    } else {
                        '0'
                    }
                }
                _ => '1',
            };
            lines.push(format!("{clk}!\n"));
        }
        for (_, w, id) in &vars {
            if rng.gen_ratio(1, 3) {
                lines.push(value(rng, *w, id));
            }
        }
        // Same-timestamp changes may come before or after the clock.
        let k = rng.gen_range(0..=lines.len());
        lines.rotate_left(k);
        for l in lines {
            out.push_str(&l);
        }
    }
    let names = vars.into_iter().map(|(n, _, _)| n).collect();
    (out, names)
}

#[test]
fn parser_agrees_with_a_naive_scanner() {
    let mut rng = common::rng(32);
    let mut checked = 0;
    for _ in 0..50 {
        let (text, names) = random_vcd_text(&mut rng);
        let reference = std::panic::catch_unwind(|| common::naive_vcd_samples(&text, "tb.clk"))
            .unwrap_or_else(|_| panic!("{text}"));
        match parse_vcd(&text, "clk") {
            Ok(db) => {
                for name in &names {
                    let expect = &reference[name];
                    assert_eq!(db.num_cycles(), expect.len(), "{text}");
                    for (c, e) in expect.iter().enumerate() {
                        assert_eq!(&db.sample(name, c).unwrap(), e, "{name} @ {c}\n{text}");
                    }
                }
                checked += 1;
            }
            Err(VcdError::MissingClock(_)) => unreachable!(),
            Err(e) => {
                // No edges at all is the only acceptable refusal.
                assert!(reference.values().all(|t| t.is_empty()), "{e}\n{text}");
            }
        }
    }
    assert!(checked >= 45);
}

#[test]
fn malformed_inputs_are_rejected() {
    let head = "$scope module t $end\n$var wire 1 ! clk $end\n$var wire 2 \" d $end\n$upscope $end\n$enddefinitions $end\n";
    assert!(matches!(
        parse_vcd(&format!("{head}#5\n1!\n#3\n0!\n"), "clk"),
        Err(VcdError::TimeReversal { .. })
    ));
    assert!(matches!(
        parse_vcd(&format!("{head}#0\n1?\n"), "clk"),
        Err(VcdError::UnknownId { .. })
    ));
    assert!(matches!(
        parse_vcd(&format!("{head}#0\nb101 \"\n"), "clk"),
        Err(VcdError::TooWide { .. })
    ));
    assert!(matches!(
        parse_vcd(head, "nope"),
        Err(VcdError::MissingClock(_))
    ));
    assert!(matches!(
        parse_vcd(&format!("{head}#0\nr1.5 \"\n"), "clk"),
        Err(VcdError::Unsupported { .. })
    ));
}

proptest! {
    #[test]
    fn round_trip_any_seed(seed in any::<u64>(), half in 1u64..6) {
        let mut rng = common::rng(seed);
        let db = common::random_db(&mut rng);
        let back = parse_vcd(&write_vcd(&db, 2 * half), "clk").unwrap();
        for name in db.signal_names() {
            for c in 0..db.num_cycles() {
                prop_assert_eq!(db.sample(name, c).unwrap(), back.sample(name, c).unwrap());
            }
        }
    }

    #[test]
    fn hold_last_beyond_the_end(seed in any::<u64>(), extra in 0usize..10) {
        let mut rng = common::rng(seed);
        let db = common::random_db(&mut rng);
        let last = db.num_cycles() - 1;
        for name in db.signal_names() {
            prop_assert_eq!(db.sample(name, last + extra).unwrap(), db.sample(name, last).unwrap());
        }
    }
}
