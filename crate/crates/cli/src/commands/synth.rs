use std::fs::File;
use std::io::{self, BufWriter, Write};

use word_entropy::synthgen::{generate, write_text, SourceSpec};

use crate::error::CliError;
use crate::SynthArgs;

pub fn run(args: SynthArgs) -> Result<(), CliError> {
    let spec = SourceSpec {
        kind: args.kind,
        types: args.v,
        exponent: args.exp,
        shift: args.shift,
        concentration: args.concentration,
        length: args.n,
        seed: args.seed,
    };
    let text = generate(&spec)?;
    match &args.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let mut out = BufWriter::new(file);
            write_text(&text, &mut out)?;
            out.flush()?;
        }
        None => {
            let mut out = BufWriter::new(io::stdout().lock());
            write_text(&text, &mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}
