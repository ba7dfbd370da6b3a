//! File handling behind the `termcode` binary.
//!
//! Inputs are paths, `-` for stdin, or corpus paths. A path of the form
//! `corpus/<file>` is looked up under `$TERMCODE_CORPUS` when that variable
//! is set, otherwise relative to the working directory; bundled case-study
//! sources answer when neither location has the file.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use termcode_core::casestudies;

/// Environment variable naming the corpus directory.
pub const CORPUS_ENV: &str = "TERMCODE_CORPUS";

const CORPUS_PREFIX: &str = "corpus/";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Core(#[from] termcode_core::Error),
}

impl CliError {
    fn io(path: impl Into<String>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<termcode_core::ParseError> for CliError {
    fn from(e: termcode_core::ParseError) -> Self {
        CliError::Core(e.into())
    }
}

/// Source text shipped with the library for a corpus file name.
pub fn bundled(file: &str) -> Option<&'static str> {
    Some(match file {
        "sts.tc" => casestudies::STS_SOURCE,
        "sols.tc" => casestudies::SOLS_SOURCE,
        "sdos1.tc" => casestudies::SDOS1_SOURCE,
        "sdos2.tc" => casestudies::SDOS2_SOURCE,
        "c5.tc" => casestudies::C5_SOURCE,
        "network.tc" => casestudies::NETWORK_SOURCE,
        "relay.tc" => casestudies::RELAY_SOURCE,
        _ => return None,
    })
}

/// Where a corpus-relative path lives on disk.
pub fn corpus_path(rest: &str) -> PathBuf {
    match std::env::var_os(CORPUS_ENV) {
        Some(dir) => Path::new(&dir).join(rest),
        None => Path::new("corpus").join(rest),
    }
}

/// Reads `path`, with `-` meaning stdin.
pub fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::io("<stdin>", e))?;
        return Ok(s);
    }
    let Some(rest) = path.strip_prefix(CORPUS_PREFIX) else {
        return fs::read_to_string(path).map_err(|e| CliError::io(path, e));
    };
    let on_disk = corpus_path(rest);
    match fs::read_to_string(&on_disk) {
        Ok(s) => Ok(s),
        Err(e) if e.kind() == io::ErrorKind::NotFound => match bundled(rest) {
            Some(s) => Ok(s.to_owned()),
            None => Err(CliError::io(on_disk.display().to_string(), e)),
        },
        Err(e) => Err(CliError::io(on_disk.display().to_string(), e)),
    }
}

/// Writes `text` to `path`, or to stdout when `path` is `None` or `-`.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, text).map_err(|e| CliError::io(p.display().to_string(), e))
        }
        _ => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

/// Writes a side file such as a witness or an LP.
pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_names() {
        assert!(bundled("c5.tc").unwrap().contains("fun f/2"));
        assert!(bundled("nope.tc").is_none());
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let e = read_input("/definitely/not/here.tc").unwrap_err();
        assert!(matches!(e, CliError::Io { .. }));
        assert!(e.to_string().starts_with("/definitely/not/here.tc"));
    }

    #[test]
    fn corpus_paths_fall_back_to_bundled_sources() {
        let text = read_input("corpus/relay.tc").unwrap();
        assert!(text.contains("out f(x1,y1);"));
        assert!(read_input("corpus/unknown.tc").is_err());
    }
}
