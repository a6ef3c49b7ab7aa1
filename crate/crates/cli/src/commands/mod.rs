pub mod run;
mod search;
mod survey;

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::{exit, CliError, Command};

pub(crate) fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Run(a) => run::cmd_run(a, out),
        Command::Search(a) => search::cmd_search(a, out),
        Command::Merge(a) => search::cmd_merge(a, out),
        Command::Graph(a) => survey::cmd_graph(a, out),
        Command::Grams(a) => survey::cmd_grams(a, out),
        Command::Cycles(a) => survey::cmd_cycles(a, out),
        Command::Walk(a) => survey::cmd_walk(a, out),
        Command::Zoo(a) => survey::cmd_zoo(a, out),
        Command::Collatz(a) => survey::cmd_collatz(a, out).map(|()| exit::OK),
    }
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)?;
    Ok(())
}

pub(crate) fn print_json(out: &mut dyn Write, v: &impl serde::Serialize) -> Result<(), CliError> {
    serde_json::to_writer(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}
