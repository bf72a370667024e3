use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rxyjpeg_core::{embed_with, extract, measure_with, recover, TerminatePolicy};
use sha2::{Digest, Sha256};

use crate::batch;
use crate::error::CliError;
use crate::io::{read, write_atomic};

#[derive(Debug, Parser)]
#[command(
    name = "rxyjpeg",
    version,
    about = "Hide data in baseline JPEG files without changing their size"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    /// Highest position holding a coefficient outside {-2,-1,1,2}.
    Max,
    /// Search every terminate point for the largest capacity.
    Optimize,
}

impl From<Policy> for TerminatePolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Max => TerminatePolicy::Max,
            Policy::Optimize => TerminatePolicy::Optimize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BatchFormat {
    /// EC and Rate grids, images by quality factor.
    Text,
    /// One tab-separated row per file.
    Rows,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report how many secret bytes a cover can carry.
    Capacity {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "max")]
        t_policy: Policy,
    },
    /// Hide a secret file in a cover.
    Embed {
        input: PathBuf,
        #[arg(long)]
        secret: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "max")]
        t_policy: Policy,
    },
    /// Write the secret carried by a marked file.
    Extract {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Restore the original cover from a marked file.
    Recover {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Cover to compare the recovered bytes against.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Measure capacity for every JPEG in a directory.
    Batch {
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: BatchFormat,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value = "max")]
        t_policy: Policy,
    },
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Runs one command, writing its report to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let out_err = |source| CliError::Io { path: PathBuf::from("<stdout>"), source };
    match cli.command {
        Command::Capacity { input, t_policy } => {
            let cover = read(&input)?;
            let r =
                measure_with(&cover, t_policy.into()).map_err(|e| CliError::codec(&input, e))?;
            writeln!(
                stdout,
                "ec_bits: {}\nrate_percent: {:.3}\nt: {}\nspecial_blocks: {}\nblocks: {}\nsaved_bytes: {}",
                r.ec_bits, r.rate_percent, r.t, r.special_count, r.block_count, r.saved_bytes
            )
            .map_err(out_err)?;
        }
        Command::Embed { input, secret, out, t_policy } => {
            let cover = read(&input)?;
            let secret_bytes = read(&secret)?;
            let marked = embed_with(&cover, &secret_bytes, t_policy.into())
                .map_err(|e| CliError::codec(&input, e))?;
            if extract(&marked).map_err(|e| CliError::codec(&out, e))? != secret_bytes {
                return Err(CliError::SecretMismatch);
            }
            write_atomic(&out, &marked)?;
            writeln!(
                stdout,
                "embedded {} bytes, size {} unchanged",
                secret_bytes.len(),
                marked.len()
            )
            .map_err(out_err)?;
        }
        Command::Extract { input, out } => {
            let marked = read(&input)?;
            let secret = extract(&marked).map_err(|e| CliError::codec(&input, e))?;
            write_atomic(&out, &secret)?;
            writeln!(stdout, "extracted {} bytes", secret.len()).map_err(out_err)?;
        }
        Command::Recover { input, out, reference } => {
            let marked = read(&input)?;
            let cover = recover(&marked).map_err(|e| CliError::codec(&input, e))?;
            let digest = sha256_hex(&cover);
            if let Some(reference) = reference {
                let expected = sha256_hex(&read(&reference)?);
                if expected != digest {
                    return Err(CliError::ReferenceMismatch { expected, actual: digest });
                }
            }
            write_atomic(&out, &cover)?;
            writeln!(stdout, "sha256: {digest}").map_err(out_err)?;
        }
        Command::Batch { dir, format, jobs, t_policy } => {
            if jobs == Some(0) {
                return Err(CliError::Usage("--jobs must be at least 1".into()));
            }
            let rows = batch::run(&dir, jobs, t_policy.into())?;
            let text = match format {
                BatchFormat::Text => batch::format_text(&rows),
                BatchFormat::Rows => batch::format_rows(&rows),
            };
            stdout.write_all(text.as_bytes()).map_err(out_err)?;
        }
    }
    Ok(())
}
