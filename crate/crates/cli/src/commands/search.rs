use std::fs;
use std::io::Write;

use serde::{Deserialize, Serialize};
use tagforge::enumeration::{merge_winners, run_shards, search_shards, search_winners, WinnerRecord};
use tagforge::parse_state_id;

use super::write_file;
use crate::{exit, CliError, MergeArgs, SearchArgs};

#[derive(Serialize, Deserialize, PartialEq, Eq, Debug)]
struct Header {
    format: String,
    version: u32,
}

#[derive(Serialize, Deserialize)]
struct Undecided {
    id: String,
    undecided: bool,
}

const WINNERS: &str = "tagforge-winners";
const CANDIDATES: &str = "tagforge-candidates";

fn render(format: &str, winners: &[WinnerRecord], undecided: &[String]) -> Result<String, CliError> {
    let mut text = serde_json::to_string(&Header { format: format.into(), version: 1 })?;
    text.push('\n');
    for w in winners {
        text.push_str(&serde_json::to_string(w)?);
        text.push('\n');
    }
    for id in undecided {
        text.push_str(&serde_json::to_string(&Undecided { id: id.clone(), undecided: true })?);
        text.push('\n');
    }
    Ok(text)
}

fn emit(text: &str, path: Option<&std::path::Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn parse_shard(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("--shard wants i/N with i < N, got {text:?}"));
    let (i, n) = text.split_once('/').ok_or_else(bad)?;
    let (i, n): (usize, usize) = (i.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?);
    if n == 0 || i >= n {
        return Err(bad());
    }
    Ok((i, n))
}

pub(crate) fn cmd_search(a: SearchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.max_len > 40 {
        return Err(CliError::Usage("--max-len above 40 is not supported".into()));
    }
    let (text, any_undecided) = match &a.shard {
        Some(spec) => {
            let (i, n) = parse_shard(spec)?;
            let mine: Vec<_> = search_shards(a.max_len, a.cap).into_iter().enumerate().filter(|(k, _)| k % n == i).map(|(_, s)| s).collect();
            let results = run_shards(mine);
            let winners: Vec<WinnerRecord> = results.iter().flat_map(|r| r.winners.iter().cloned()).collect();
            let undecided: Vec<String> = results.iter().flat_map(|r| r.undecided.iter().cloned()).collect();
            (render(CANDIDATES, &winners, &undecided)?, !undecided.is_empty())
        }
        None => {
            let s = search_winners(a.max_len, a.cap);
            (render(WINNERS, &s.winners, &s.undecided)?, !s.undecided.is_empty())
        }
    };
    emit(&text, a.out.as_deref(), out)?;
    Ok(if any_undecided { exit::UNDECIDED } else { exit::OK })
}

pub(crate) fn cmd_merge(a: MergeArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.inputs.is_empty() {
        return Err(CliError::Usage("merge needs at least one shard file".into()));
    }
    let mut candidates = Vec::new();
    let mut undecided = Vec::new();
    for path in &a.inputs {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Header = serde_json::from_str(lines.next().unwrap_or(""))
            .map_err(|e| CliError::Data(format!("{}: bad header: {e}", path.display())))?;
        if header.format != CANDIDATES || header.version != 1 {
            return Err(CliError::Data(format!("{}: expected {CANDIDATES} v1, found {} v{}", path.display(), header.format, header.version)));
        }
        for line in lines {
            if let Ok(w) = serde_json::from_str::<WinnerRecord>(line) {
                candidates.push(w);
            } else {
                let u: Undecided = serde_json::from_str(line).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                undecided.push(u.id);
            }
        }
    }
    let winners = merge_winners(candidates).map_err(|e| CliError::Data(e.to_string()))?;
    let mut keyed = undecided
        .into_iter()
        .map(|id| Ok((parse_state_id(&id).map_err(|e| CliError::Data(e.to_string()))?, id)))
        .collect::<Result<Vec<_>, CliError>>()?;
    keyed.sort();
    let undecided: Vec<String> = keyed.into_iter().map(|(_, id)| id).collect();
    emit(&render(WINNERS, &winners, &undecided)?, a.out.as_deref(), out)?;
    Ok(if undecided.is_empty() { exit::OK } else { exit::UNDECIDED })
}
