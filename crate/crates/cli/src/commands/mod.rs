pub mod analyze;
pub mod converge;
pub mod entropy;
pub mod ratios;
pub mod synth;

use std::path::PathBuf;

use serde::Serialize;
use word_entropy::corpus::{corpus_files, source_id_for, tokenize_with, TokenizeOptions};
use word_entropy::{read_verse_file, Exec, TokenizedText};

use crate::error::CliError;

pub struct LoadedText {
    pub label: String,
    pub path: PathBuf,
    pub text: TokenizedText,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileError {
    pub path: String,
    pub message: String,
}

/// Reads and tokenizes every input file; unreadable files become
/// [`FileError`]s instead of ending the run.
pub fn load_texts(
    paths: &[PathBuf],
    nfc: bool,
) -> Result<(Vec<LoadedText>, Vec<FileError>), CliError> {
    let files = corpus_files(paths)?;
    let loaded = Exec::Parallel.map(&files, |path| {
        read_verse_file(path)
            .map(|doc| LoadedText {
                label: source_id_for(path),
                path: path.clone(),
                text: tokenize_with(&doc, TokenizeOptions { nfc }),
            })
            .map_err(|e| FileError {
                path: path.display().to_string(),
                message: e.to_string(),
            })
    });
    let mut texts = Vec::new();
    let mut errors = Vec::new();
    for item in loaded {
        match item {
            Ok(t) => texts.push(t),
            Err(e) => errors.push(e),
        }
    }
    texts.sort_by(|a, b| (&a.label, &a.path).cmp(&(&b.label, &b.path)));
    errors.sort_by(|a, b| a.path.cmp(&b.path));
    Ok((texts, errors))
}

/// Reads a tab-separated file with a header row; `#` lines are skipped.
pub fn read_tsv(path: &std::path::Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .comment(Some(b'#'))
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        rows.push(record.iter().map(|c| c.trim().to_string()).collect());
    }
    Ok((header, rows))
}

pub fn column(header: &[String], name: &str, path: &std::path::Path) -> Result<usize, CliError> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Usage(format!("{}: no column named {name:?}", path.display())))
}

/// Parses a numeric cell; `NA` and empty cells are `None`.
pub fn parse_cell(value: &str, what: &str) -> Result<Option<f64>, CliError> {
    if value.is_empty() || value == "NA" {
        return Ok(None);
    }
    value
        .parse()
        .map(Some)
        .map_err(|_| CliError::Usage(format!("invalid number {value:?} in {what}")))
}
