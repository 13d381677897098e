//! Text formats for networks, population snapshots and training sets.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! a file back yields bit-identical values.

use std::fmt::Write as _;
use std::path::Path;

use boxnet_core::evolution::{Snapshot, Variant};
use boxnet_core::network::{BoardEncoding, INPUTS, OUTPUTS, PARAM_COUNT};
use boxnet_core::{Genome, Network, Target, TrainingExample};

use crate::error::{LabError, Result};

pub const NETWORK_HEADER: &str = "24 9 24";

pub fn network_to_text(net: &Network) -> String {
    let mut s = String::from(NETWORK_HEADER);
    s.push('\n');
    for p in net.params() {
        writeln!(s, "{p}").unwrap();
    }
    s
}

pub fn network_from_text(text: &str, source: &str) -> Result<Network> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.split_whitespace().eq(NETWORK_HEADER.split_whitespace()) => {}
        Some((n, h)) => {
            return Err(LabError::parse(
                source,
                n + 1,
                format!("expected header {NETWORK_HEADER:?}, got {h:?}"),
            ))
        }
        None => return Err(LabError::parse(source, 1, "empty network file")),
    }
    let mut params = Vec::with_capacity(PARAM_COUNT);
    for (n, line) in lines {
        let v: f64 = line
            .trim()
            .parse()
            .map_err(|e| LabError::parse(source, n + 1, format!("{e}")))?;
        params.push(v);
    }
    if params.len() != PARAM_COUNT {
        return Err(LabError::parse(
            source,
            0,
            format!("expected {PARAM_COUNT} parameters, found {}", params.len()),
        ));
    }
    Ok(Network::from_params(&params)?)
}

pub fn snapshot_to_text(s: &Snapshot) -> String {
    let mut out = format!(
        "gen={} games={} variant={} seed={}\n",
        s.generation, s.cumulative_games, s.variant, s.seed
    );
    for (g, f) in s.genomes.iter().zip(&s.raw_fitness) {
        writeln!(out, "{} {f}", g.to_hex()).unwrap();
    }
    out
}

pub fn snapshot_from_text(text: &str, source: &str) -> Result<Snapshot> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| LabError::parse(source, 1, "empty snapshot"))?;
    let mut generation = None;
    let mut games = None;
    let mut variant = None;
    let mut seed = None;
    for field in header.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| LabError::parse(source, 1, format!("bad header field {field:?}")))?;
        let bad = |m: String| LabError::parse(source, 1, m);
        match k {
            "gen" => generation = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "games" => games = Some(v.parse::<u64>().map_err(|e| bad(e.to_string()))?),
            "variant" => variant = Some(v.parse::<Variant>()?),
            "seed" => seed = Some(v.parse::<u64>().map_err(|e| bad(e.to_string()))?),
            _ => return Err(bad(format!("unknown header field {k:?}"))),
        }
    }
    let missing = |name: &str| LabError::parse(source, 1, format!("header lacks {name}"));
    let mut snap = Snapshot {
        generation: generation.ok_or_else(|| missing("gen"))?,
        cumulative_games: games.ok_or_else(|| missing("games"))?,
        variant: variant.ok_or_else(|| missing("variant"))?,
        seed: seed.ok_or_else(|| missing("seed"))?,
        genomes: Vec::new(),
        raw_fitness: Vec::new(),
    };
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (hex, fit) = line
            .trim()
            .split_once(' ')
            .ok_or_else(|| LabError::parse(source, n + 1, "expected `<hex genome> <fitness>`"))?;
        let g = Genome::from_hex(hex).map_err(|e| LabError::parse(source, n + 1, e.to_string()))?;
        let f: f64 = fit
            .trim()
            .parse()
            .map_err(|e| LabError::parse(source, n + 1, format!("{e}")))?;
        snap.genomes.push(g);
        snap.raw_fitness.push(f);
    }
    Ok(snap)
}

pub fn example_to_line(ex: &TrainingExample) -> String {
    let board: String = ex
        .board
        .0
        .iter()
        .map(|&x| if x == 1.0 { '1' } else { '0' })
        .collect();
    let targets: Vec<String> = ex
        .targets
        .iter()
        .map(|t| match t {
            Target::Illegal => "x".to_string(),
            Target::Boxes(k) => k.to_string(),
        })
        .collect();
    format!("{board} {}", targets.join(","))
}

pub fn example_from_line(line: &str) -> std::result::Result<TrainingExample, String> {
    let (board, targets) = line
        .trim()
        .split_once(' ')
        .ok_or("expected `<board> <targets>`")?;
    if board.len() != INPUTS {
        return Err(format!("board must have {INPUTS} characters"));
    }
    let mut enc = [0.0; INPUTS];
    for (x, ch) in enc.iter_mut().zip(board.chars()) {
        *x = match ch {
            '0' => 0.0,
            '1' => 1.0,
            _ => return Err(format!("bad board character {ch:?}")),
        };
    }
    let tokens: Vec<&str> = targets.trim().split(',').collect();
    if tokens.len() != OUTPUTS {
        return Err(format!("expected {OUTPUTS} targets, got {}", tokens.len()));
    }
    let mut out = [Target::Illegal; OUTPUTS];
    for (k, tok) in tokens.iter().enumerate() {
        out[k] = match *tok {
            "x" => Target::Illegal,
            "0" => Target::Boxes(0),
            "1" => Target::Boxes(1),
            "2" => Target::Boxes(2),
            _ => return Err(format!("bad target token {tok:?}")),
        };
        if (out[k] == Target::Illegal) != (enc[k] == 1.0) {
            return Err(format!("edge {k}: target legality disagrees with board"));
        }
    }
    Ok(TrainingExample {
        board: BoardEncoding(enc),
        targets: out,
    })
}

pub fn training_set_to_text(data: &[TrainingExample]) -> String {
    let mut s = String::new();
    for ex in data {
        s.push_str(&example_to_line(ex));
        s.push('\n');
    }
    s
}

pub fn training_set_from_text(text: &str, source: &str) -> Result<Vec<TrainingExample>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| example_from_line(l).map_err(|m| LabError::parse(source, n + 1, m)))
        .collect()
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| LabError::io(path, e))
}

pub fn load_network(path: &Path) -> Result<Network> {
    network_from_text(&read_text(path)?, &path.display().to_string())
}

pub fn load_snapshot(path: &Path) -> Result<Snapshot> {
    snapshot_from_text(&read_text(path)?, &path.display().to_string())
}

/// File name for a snapshot inside an output directory.
pub fn snapshot_file_name(generation: usize) -> String {
    format!("snapshot_{generation:06}.txt")
}
