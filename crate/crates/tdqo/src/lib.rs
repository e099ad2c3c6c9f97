//! Command-line front end for `tdqo-core`: configuration, CSV/JSON formats,
//! the verification suite and the subcommands behind the `tdqo` binary.

pub mod commands;
pub mod config;
pub mod descriptor;
pub mod error;
pub mod fmt;
pub mod io;
pub mod verify;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Installs the global rayon pool: `--threads`, else `TDQO_THREADS`, else rayon's default.
pub fn init_threads(flag: Option<usize>) -> error::Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("TDQO_THREADS") {
            Ok(s) if !s.trim().is_empty() => Some(
                s.trim().parse::<usize>().map_err(|_| error::CliError::config(format!("TDQO_THREADS must be an integer, got `{s}`")))?,
            ),
            _ => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(error::CliError::config("thread count must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| error::CliError::config(format!("thread pool: {e}")))?;
    }
    Ok(())
}
