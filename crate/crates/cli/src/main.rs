//! `bke`: command-line client for the bke service.
//!
//! Without `--server` each invocation starts an in-process server on a
//! loopback port and talks to it over HTTP, so local and remote use go
//! through the same code path.
//!
//! Exit codes: 0 success, 1 usage, 2 crypto failure, 3 integrity failure,
//! 4 I/O.

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bke_client::{Client, ClientError};
use bke_core::api::{
    self, BenchRequest, DecryptRequest, EncryptRequest, ErrorKind, ExpandRequest, FixedExpander,
    FlowRequest, KeygenRequest,
};
use bke_core::bench::TableFormat;
use bke_core::protocol::FlowKind;
use bke_core::Preset;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bke", version, about = "NTRU key expansion and butterfly pseudonym certificates")]
struct Cli {
    /// Base URL of a running service; an embedded one is started otherwise.
    #[arg(long, global = true)]
    server: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair.
    Keygen {
        #[arg(long, default_value = "ntru509")]
        preset: Preset,
        #[arg(long)]
        out_private: PathBuf,
        #[arg(long)]
        out_public: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Encrypt and decrypt a test message with the new pair.
        #[arg(long)]
        self_test: bool,
    },
    /// Multiply a public key by a fresh small expander.
    Expand {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the expander to this path.
        #[arg(long)]
        keep_secret: Option<PathBuf>,
        #[arg(long, value_enum, hide = true)]
        fixed_expander: Option<FixedArg>,
    },
    /// Encrypt a file under a public or expanded key.
    Encrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decrypt a file with a private key.
    Decrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a certificate issuance flow and print its transcript.
    Demo {
        #[arg(long, value_enum, default_value = "butterfly")]
        flow: FlowArg,
        #[arg(long, default_value = "ntru509")]
        preset: Preset,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Time keygen against key expansion.
    Bench {
        /// Repeatable; defaults to ntru509, ntru677 and ntru821.
        #[arg(long = "preset")]
        presets: Vec<Preset>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the HTTP service in the foreground.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FixedArg {
    One,
    X,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlowArg {
    Direct,
    Butterfly,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Text,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::new(4, format!("{}: {e}", path.display()))
    }
}

impl From<ClientError> for Failure {
    fn from(e: ClientError) -> Self {
        match e {
            ClientError::Api(api) => {
                let code = match api.kind {
                    ErrorKind::Usage => 1,
                    ErrorKind::Crypto | ErrorKind::Internal => 2,
                    ErrorKind::Integrity => 3,
                };
                let message = match api.step {
                    Some(step) => format!("{step}: {}", api.message),
                    None => api.message,
                };
                Failure::new(code, message)
            }
            other => Failure::new(4, other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::io(path, e))
}

async fn client(server: Option<String>) -> Result<Client, Failure> {
    match server {
        Some(url) => Ok(Client::new(url)),
        None => {
            let addr = bke_server::spawn(([127, 0, 0, 1], 0).into())
                .await
                .map_err(|e| Failure::new(4, format!("cannot start embedded server: {e}")))?;
            Ok(Client::new(format!("http://{addr}")))
        }
    }
}

async fn run(cli: Cli) -> Result<(), Failure> {
    if let Command::Serve { listen } = cli.command {
        let listener = tokio::net::TcpListener::bind(listen)
            .await
            .map_err(|e| Failure::new(4, format!("{listen}: {e}")))?;
        println!("listening on http://{}", listener.local_addr().map_err(|e| Failure::new(4, e.to_string()))?);
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        return bke_server::serve(listener, shutdown)
            .await
            .map_err(|e| Failure::new(4, e.to_string()));
    }

    let client = client(cli.server).await?;
    match cli.command {
        Command::Keygen {
            preset,
            out_private,
            out_public,
            seed,
            self_test,
        } => {
            let resp = client
                .keygen(&KeygenRequest {
                    preset,
                    seed,
                    self_test,
                })
                .await?;
            write(&out_private, &resp.private_key)?;
            write(&out_public, &resp.public_key)?;
            println!("public key fingerprint {}", resp.public_fingerprint);
            if let Some(passed) = resp.self_test {
                println!("self-test {}", if passed { "passed" } else { "FAILED" });
                if !passed {
                    return Err(Failure::new(2, "self-test failed"));
                }
            }
        }
        Command::Expand {
            input,
            out,
            seed,
            keep_secret,
            fixed_expander,
        } => {
            let resp = client
                .expand(&ExpandRequest {
                    key: read(&input)?,
                    seed,
                    keep_secret: keep_secret.is_some(),
                    fixed_expander: fixed_expander.map(|f| match f {
                        FixedArg::One => FixedExpander::One,
                        FixedArg::X => FixedExpander::X,
                    }),
                })
                .await?;
            write(&out, &resp.expanded_key)?;
            if let (Some(path), Some(bytes)) = (keep_secret, resp.expander) {
                write(&path, &bytes)?;
            }
            println!("expanded key depth {} fingerprint {}", resp.depth, resp.expanded_fingerprint);
            println!("expander fingerprint {}", resp.expander_fingerprint);
        }
        Command::Encrypt {
            key,
            input,
            out,
            seed,
        } => {
            let resp = client
                .encrypt(&EncryptRequest {
                    key: read(&key)?,
                    plaintext: read(&input)?,
                    seed,
                })
                .await?;
            write(&out, &resp.ciphertext)?;
            println!("encrypted {} blocks", resp.blocks);
        }
        Command::Decrypt { key, input, out } => {
            let resp = client
                .decrypt(&DecryptRequest {
                    private_key: read(&key)?,
                    ciphertext: read(&input)?,
                })
                .await?;
            write(&out, &resp.plaintext)?;
            println!("decrypted {} bytes", resp.plaintext.len());
        }
        Command::Demo { flow, preset, seed } => {
            let flow = match flow {
                FlowArg::Direct => FlowKind::Direct,
                FlowArg::Butterfly => FlowKind::Butterfly,
            };
            let resp = client.run_flow(&FlowRequest { flow, preset, seed }).await?;
            print!("{}", resp.transcript);
            if !resp.ok {
                return Err(Failure::new(2, "flow invariants violated"));
            }
        }
        Command::Bench {
            presets,
            trials,
            format,
            seed,
        } => {
            let presets = if presets.is_empty() {
                Preset::STANDARD.to_vec()
            } else {
                presets
            };
            let format = match format {
                FormatArg::Csv => TableFormat::Csv,
                FormatArg::Text => TableFormat::Text,
            };
            let resp = client
                .bench(&BenchRequest {
                    presets,
                    trials,
                    format,
                    seed,
                })
                .await?;
            print!("{}", resp.table);
            if !resp.passed {
                return Err(Failure::new(
                    2,
                    format!("speedup below {} at some preset", api::SPEEDUP_THRESHOLD),
                ));
            }
        }
        Command::Serve { .. } => unreachable!("handled above"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    };
    match runtime.block_on(run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
