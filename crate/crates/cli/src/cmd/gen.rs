use std::fs;
use std::path::Path;

use acciht::problems::save_instance;

use crate::args::{echo, merge, GenArgs};
use crate::error::{invalid, CliError, CliResult};
use crate::output::{ensure_writable, write_atomic};
use crate::source::{check_source, load, SOLVE_DEFAULTS};

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn run(flags: GenArgs) -> CliResult<()> {
    let args = merge(&flags, flags.config.as_deref())?;
    if args.source.input.is_some() {
        return invalid("gen takes a generator, not --input");
    }
    check_source(&args.source)?;
    let Some(out) = args.out.clone() else {
        return invalid("--out is required");
    };
    ensure_writable(&out)?;
    if out.exists() && fs::read_dir(&out).map_err(|e| io(&out, e))?.next().is_some() {
        if !args.force {
            return Err(CliError::Io(format!(
                "{} is not empty (use --force to replace it)",
                out.display()
            )));
        }
    }
    let seed = args.source.seed.unwrap_or(0);
    let loaded = load(&args.source, &SOLVE_DEFAULTS, seed)?;

    // stage next to the destination, then swap in
    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => ".".into(),
    };
    fs::create_dir_all(&parent).map_err(|e| io(&parent, e))?;
    let stage = tempfile::Builder::new()
        .prefix(".acciht-gen")
        .tempdir_in(&parent)
        .map_err(|e| io(&parent, e))?;
    match &loaded.test {
        Some(test) => {
            save_instance(&loaded.train, &stage.path().join("train"))?;
            save_instance(test, &stage.path().join("test"))?;
        }
        None => save_instance(&loaded.train, stage.path())?,
    }
    let mut echoed = args.clone();
    echoed.source.seed = Some(seed);
    echoed.force = false;
    write_atomic(
        &stage.path().join("config.json"),
        &(serde_json::to_string_pretty(&echo(&echoed)?)? + "\n"),
    )?;
    if out.exists() {
        fs::remove_dir_all(&out).map_err(|e| io(&out, e))?;
    }
    let staged = stage.keep();
    fs::rename(&staged, &out).map_err(|e| io(&out, e))?;
    eprintln!("wrote {}", out.display());
    Ok(())
}
