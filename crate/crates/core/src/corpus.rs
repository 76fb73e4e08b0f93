//! Text ingestion: raw documents, word tokenization, vocabularies and
//! frequency tables.
//!
//! A word token is a maximal run of Unicode letters (`L*`), numbers (`N*`)
//! and combining marks (`M*`) that contains at least one letter or number.
//! Everything else (punctuation, symbols, separators, controls) delimits.
//! Every kept character is mapped through Unicode simple case folding.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use unicode_general_category::{get_general_category, GeneralCategory};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// A text as read from disk, before tokenization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub source_id: String,
    pub content: String,
}

impl RawDocument {
    pub fn new(source_id: impl Into<String>, content: impl Into<String>) -> Self {
        Self {
            source_id: source_id.into(),
            content: content.into(),
        }
    }

    /// Decodes `bytes` as UTF-8, reporting the offset of the first invalid
    /// sequence on failure.
    pub fn from_bytes(source_id: impl Into<String>, bytes: Vec<u8>) -> Result<Self> {
        let source_id = source_id.into();
        match String::from_utf8(bytes) {
            Ok(content) => Ok(Self { source_id, content }),
            Err(e) => Err(Error::InvalidUtf8 {
                source_id,
                offset: e.utf8_error().valid_up_to(),
            }),
        }
    }
}

/// Bijection between word types and dense IDs `0..len()`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    type_to_id: HashMap<String, u32>,
    id_to_type: Vec<String>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the ID of `word`, assigning the next free ID if it is new.
    pub fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.type_to_id.get(word) {
            return id;
        }
        let id = u32::try_from(self.id_to_type.len()).expect("vocabulary exceeds u32 IDs");
        self.type_to_id.insert(word.to_owned(), id);
        self.id_to_type.push(word.to_owned());
        id
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.type_to_id.get(word).copied()
    }

    pub fn word(&self, id: u32) -> Option<&str> {
        self.id_to_type.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.id_to_type.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_type.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.id_to_type.iter().map(String::as_str)
    }
}

/// A token-ID sequence together with the vocabulary that names the IDs.
///
/// The vocabulary is shared between a text and its prefixes.
#[derive(Debug, Clone)]
pub struct TokenizedText {
    tokens: Vec<u32>,
    vocab: Arc<Vocabulary>,
    source_id: String,
}

impl TokenizedText {
    /// Builds a text from raw IDs. Fails if any ID is outside the vocabulary.
    pub fn from_ids(
        source_id: impl Into<String>,
        tokens: Vec<u32>,
        vocab: Arc<Vocabulary>,
    ) -> Result<Self> {
        if let Some(&bad) = tokens.iter().find(|&&t| t as usize >= vocab.len()) {
            return Err(Error::Domain(format!(
                "token ID {bad} outside vocabulary of size {}",
                vocab.len()
            )));
        }
        Ok(Self {
            tokens,
            vocab,
            source_id: source_id.into(),
        })
    }

    /// Builds a text from word strings, interning them in first-occurrence
    /// order. The words are taken as-is, without tokenization.
    pub fn from_words<S: AsRef<str>>(source_id: impl Into<String>, words: &[S]) -> Self {
        let mut vocab = Vocabulary::new();
        let tokens = words.iter().map(|w| vocab.intern(w.as_ref())).collect();
        Self {
            tokens,
            vocab: Arc::new(vocab),
            source_id: source_id.into(),
        }
    }

    pub fn tokens(&self) -> &[u32] {
        &self.tokens
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Iterates the word strings of the tokens.
    pub fn words(&self) -> impl Iterator<Item = &str> + '_ {
        self.tokens
            .iter()
            .map(move |&t| self.vocab.word(t).expect("token IDs are validated"))
    }
}

/// Token counts indexed by type ID. Types absent from the text may carry a
/// zero count (e.g. in a prefix that shares its parent's vocabulary).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: Vec<u64>,
    total: u64,
}

impl FrequencyTable {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// N, the number of tokens.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// V, the number of types with a nonzero count.
    pub fn n_types(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Nonzero counts, in ID order.
    pub fn present(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts.iter().copied().filter(|&c| c > 0)
    }

    /// Maps each distinct nonzero count to the number of types having it.
    pub fn count_of_counts(&self) -> BTreeMap<u64, u64> {
        let mut out = BTreeMap::new();
        for c in self.present() {
            *out.entry(c).or_insert(0) += 1;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TokenizeOptions {
    /// Apply NFC normalization before tokenizing.
    pub nfc: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Word,
    Mark,
    Delimiter,
}

fn classify(c: char) -> CharClass {
    use GeneralCategory::*;
    match get_general_category(c) {
        UppercaseLetter | LowercaseLetter | TitlecaseLetter | ModifierLetter | OtherLetter
        | DecimalNumber | LetterNumber | OtherNumber => CharClass::Word,
        NonspacingMark | SpacingMark | EnclosingMark => CharClass::Mark,
        _ => CharClass::Delimiter,
    }
}

fn fold_case(c: char) -> char {
    unicode_case_mapping::case_folded(c)
        .and_then(|cp| char::from_u32(cp.get()))
        .unwrap_or(c)
}

/// Splits `content` into case-folded word strings.
pub fn word_strings(content: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut has_base = false;
    for c in content.chars() {
        match classify(c) {
            CharClass::Word => {
                current.push(fold_case(c));
                has_base = true;
            }
            CharClass::Mark => current.push(fold_case(c)),
            CharClass::Delimiter => {
                if has_base {
                    out.push(std::mem::take(&mut current));
                } else {
                    current.clear();
                }
                has_base = false;
            }
        }
    }
    if has_base {
        out.push(current);
    }
    out
}

/// Tokenizes a document with default options (no normalization).
pub fn tokenize(doc: &RawDocument) -> TokenizedText {
    tokenize_with(doc, TokenizeOptions::default())
}

pub fn tokenize_with(doc: &RawDocument, opts: TokenizeOptions) -> TokenizedText {
    let words = if opts.nfc {
        let normalized: String = doc.content.nfc().collect();
        word_strings(&normalized)
    } else {
        word_strings(&doc.content)
    };
    TokenizedText::from_words(doc.source_id.clone(), &words)
}

/// Reads a plain-text or verse-per-line file.
///
/// Lines of the form `<verse_id>\t<text>` contribute their text, joined with
/// single spaces; `#` lines are comments. A file with no tab on any
/// non-comment line is returned verbatim.
pub fn read_verse_file(path: impl AsRef<Path>) -> Result<RawDocument> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let doc = RawDocument::from_bytes(source_id_for(path), bytes)?;
    Ok(RawDocument {
        content: parse_verse_content(&doc.content),
        source_id: doc.source_id,
    })
}

pub(crate) fn parse_verse_content(content: &str) -> String {
    let body = || content.lines().filter(|l| !l.starts_with('#'));
    if !body().any(|l| l.contains('\t')) {
        return content.to_owned();
    }
    let mut out = String::with_capacity(content.len());
    for line in body() {
        let text = match line.split_once('\t') {
            Some((_, text)) => text,
            None => line,
        };
        let text = text.trim();
        if text.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(text);
    }
    out
}

/// File stem used as a text label.
pub fn source_id_for(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Expands input paths into text files: directories contribute their
/// regular, non-hidden files (not recursive) in name order.
pub fn corpus_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        let meta = fs::metadata(input).map_err(|source| Error::Io {
            path: input.clone(),
            source,
        })?;
        if !meta.is_dir() {
            out.push(input.clone());
            continue;
        }
        let entries = fs::read_dir(input).map_err(|source| Error::Io {
            path: input.clone(),
            source,
        })?;
        let mut files = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|source| Error::Io {
                path: input.clone(),
                source,
            })?;
            let path = entry.path();
            let hidden = path
                .file_name()
                .is_some_and(|n| n.to_string_lossy().starts_with('.'));
            if path.is_file() && !hidden {
                files.push(path);
            }
        }
        files.sort();
        out.extend(files);
    }
    Ok(out)
}

pub fn frequency_table(text: &TokenizedText) -> FrequencyTable {
    let mut counts = vec![0u64; text.vocab.len()];
    for &t in &text.tokens {
        counts[t as usize] += 1;
    }
    FrequencyTable {
        counts,
        total: text.tokens.len() as u64,
    }
}

/// The first `n` tokens of `text`, sharing its vocabulary.
pub fn prefix(text: &TokenizedText, n: usize) -> Result<TokenizedText> {
    if n > text.len() {
        return Err(Error::OutOfRange {
            requested: n,
            available: text.len(),
        });
    }
    Ok(TokenizedText {
        tokens: text.tokens[..n].to_vec(),
        vocab: Arc::clone(&text.vocab),
        source_id: text.source_id.clone(),
    })
}
