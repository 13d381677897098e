//! CSV output for evaluation records and evolution curves.

use std::io::{Read, Write};

use boxnet_core::{CurvePoint, EvalRecord};
use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Serialize, Deserialize)]
struct EvalRow {
    subject: String,
    opponent: String,
    games: u64,
    wins: u64,
    win_rate: f64,
    ci95: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CurveRow {
    variant: String,
    cumulative_games: u64,
    best_win_rate: f64,
}

pub const EVAL_HEADER: &str = "subject,opponent,games,wins,win_rate,ci95";
pub const CURVE_HEADER: &str = "variant,cumulative_games,best_win_rate";

fn write_rows<W: Write, R: Serialize>(
    out: W,
    header: &str,
    rows: impl Iterator<Item = R>,
) -> Result<()> {
    // header written by hand so an empty input still yields it
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(header.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_eval_csv<W: Write>(out: W, records: &[EvalRecord]) -> Result<()> {
    write_rows(
        out,
        EVAL_HEADER,
        records.iter().map(|r| EvalRow {
            subject: r.subject.clone(),
            opponent: r.opponent.clone(),
            games: r.games,
            wins: r.wins,
            win_rate: r.win_rate,
            ci95: r.confidence_halfwidth,
        }),
    )
}

pub fn read_eval_csv<R: Read>(input: R) -> Result<Vec<EvalRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    rd.deserialize::<EvalRow>()
        .map(|row| {
            let r = row?;
            Ok(EvalRecord {
                subject: r.subject,
                opponent: r.opponent,
                games: r.games,
                wins: r.wins,
                win_rate: r.win_rate,
                confidence_halfwidth: r.ci95,
            })
        })
        .collect()
}

pub fn write_curve_csv<W: Write>(out: W, points: &[CurvePoint]) -> Result<()> {
    write_rows(
        out,
        CURVE_HEADER,
        points.iter().map(|p| CurveRow {
            variant: p.variant.clone(),
            cumulative_games: p.cumulative_games,
            best_win_rate: p.best_win_rate,
        }),
    )
}

pub fn read_curve_csv<R: Read>(input: R) -> Result<Vec<CurvePoint>> {
    let mut rd = csv::Reader::from_reader(input);
    rd.deserialize::<CurveRow>()
        .map(|row| {
            let r = row?;
            Ok(CurvePoint {
                variant: r.variant,
                cumulative_games: r.cumulative_games,
                best_win_rate: r.best_win_rate,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_inputs_header_only() {
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "variant,cumulative_games,best_win_rate\n"
        );
        let mut buf = Vec::new();
        write_eval_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{EVAL_HEADER}\n"));
    }

    #[test]
    fn single_curve_point() {
        let mut buf = Vec::new();
        let p = CurvePoint {
            variant: "roundrobin".into(),
            cumulative_games: 9900,
            best_win_rate: 0.61,
        };
        write_curve_csv(&mut buf, std::slice::from_ref(&p)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "variant,cumulative_games,best_win_rate\nroundrobin,9900,0.61\n"
        );
        assert_eq!(read_curve_csv(text.as_bytes()).unwrap(), vec![p]);
    }

    fn record() -> impl Strategy<Value = EvalRecord> {
        (
            "[a-z0-9:_./,\" ]{1,12}",
            "level[0-2]",
            2u64..100_000,
            0.0f64..=1.0,
        )
            .prop_map(|(subject, opponent, games, frac)| {
                let wins = (games as f64 * frac) as u64;
                EvalRecord::new(subject, opponent, games, wins)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn eval_csv_roundtrip(records in prop::collection::vec(record(), 0..5)) {
            let mut buf = Vec::new();
            write_eval_csv(&mut buf, &records).unwrap();
            prop_assert_eq!(read_eval_csv(buf.as_slice()).unwrap(), records);
        }
    }
}
