//! Running a TOML experiment from code, emitting CSV, and replaying a dump.
//!
//! Pass a config path as the first argument; the bundled pinching config is
//! used otherwise.

use ncerg::expcli::{dump, parse_config, render, replay_dump, run, Command, Format};

fn main() -> ncerg::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/pinch.toml").to_string());
    let text = std::fs::read_to_string(&path).map_err(|source| ncerg::Error::Io { path: path.clone().into(), source })?;
    let config = parse_config(&text)?;

    let out = run(&config, Command::Prop1)?;
    print!("{}", render(&out.rows, Format::Csv)?);

    let dir = std::env::temp_dir().join(format!("ncerg-{}", config.id));
    dump(&dir, &config, Command::Prop1, &out)?;
    let replayed = replay_dump(&dir)?;
    println!("replayed {} rows from {}", replayed.len(), dir.display());
    Ok(())
}
