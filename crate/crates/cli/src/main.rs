use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use understudy::bn::io::{network_from_json, read_dataset, read_network, write_dataset};
use understudy::dsep::{enumerate_relations, parse_relations, relations_to_text};
use understudy::eval::{build_sample_query_set, build_total_query_set, evaluate, MaeReport, Predictor};
use understudy::experiments::{
    emit_reports, run_robustness, run_sweep, training_data, ExperimentConfig, RunRecord,
};
use understudy::nn::{Checkpoint, Layout};
use understudy::rng::{self, stream};
use understudy::understudy::{train_new, Strategy, TrainConfig, UnderstudyModel};

#[derive(Parser)]
#[command(name = "understudy", version, about = "Neural understudies of discrete Bayesian networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum NeuralModel {
    Nn,
    NnReg,
    NnCor,
}

impl NeuralModel {
    fn strategy(self) -> Strategy {
        match self {
            NeuralModel::Nn => Strategy::Plain,
            NeuralModel::NnReg => Strategy::Reg,
            NeuralModel::NnCor => Strategy::Cor,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Queries {
    Total,
    Sample,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a training set from a network by forward sampling.
    Generate {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// List the d-separation relations implied by a network's DAG.
    Dsep {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a neural understudy and write a checkpoint.
    Train {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        model: NeuralModel,
        /// Relation file; defaults to the relations of the network's DAG.
        #[arg(long)]
        relations: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        hidden: Option<usize>,
        #[arg(long)]
        batch: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a checkpoint or a network file against the ground truth.
    Evaluate {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        model_file: PathBuf,
        #[arg(long, value_enum)]
        queries: Queries,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the query set as JSON lines.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Four-model sample-efficiency sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// DAG-misspecification study.
    Robustness {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate {
            net,
            count,
            seed,
            out,
        } => {
            let truth = load_network(&net)?;
            let data = training_data(&truth, count, seed)?;
            write_dataset(&out, truth.dag(), &data)?;
            println!("wrote {count} samples to {}", out.display());
        }
        Command::Dsep { net, out } => {
            let dag = load_network(&net)?.dag().clone();
            let rels = enumerate_relations(&dag);
            let text = relations_to_text(&rels, &dag);
            match out {
                Some(path) => fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            println!("{} relations", rels.len());
        }
        Command::Train {
            net,
            data,
            model,
            relations,
            alpha,
            epochs,
            hidden,
            batch,
            lr,
            seed,
            out,
        } => {
            let truth = load_network(&net)?;
            let dag = truth.dag();
            let data = read_dataset(&data, dag)?;
            let rels = match relations {
                Some(path) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    parse_relations(&text, dag)?
                }
                None => enumerate_relations(dag),
            };
            let defaults = TrainConfig::default();
            let cfg = TrainConfig {
                strategy: model.strategy(),
                alpha: alpha.unwrap_or(defaults.alpha),
                epochs: epochs.unwrap_or(defaults.epochs),
                hidden: hidden.unwrap_or(defaults.hidden),
                batch_size: batch.unwrap_or(defaults.batch_size),
                learning_rate: lr.unwrap_or(defaults.learning_rate),
                seed,
                ..defaults
            };
            let (trained, history) = train_new(Layout::from_dag(dag), &data, &cfg, &rels)?;
            trained.to_checkpoint(&cfg)?.write(&out)?;
            if let Some(loss) = history.target_loss.last() {
                println!("final epoch loss {loss:.6}");
            }
            println!("wrote {}", out.display());
        }
        Command::Evaluate {
            net,
            model_file,
            queries,
            count,
            seed,
            dump,
        } => {
            let truth = load_network(&net)?;
            let set = match queries {
                Queries::Total => build_total_query_set(&truth)?,
                Queries::Sample => {
                    build_sample_query_set(&truth, &mut rng::derive(seed, stream::QUERY_SET, &[]), count)?
                }
            };
            if let Some(path) = dump {
                let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                set.write_jsonl(truth.dag(), std::io::BufWriter::new(file))?;
            }
            let predictor = load_predictor(&model_file)?;
            print_report(&evaluate(predictor.as_ref(), &set)?, set.skipped);
        }
        Command::Sweep { config, out } => {
            let cfg = ExperimentConfig::read(&config)?;
            let dir = output_dir(&cfg, out)?;
            report(&run_sweep(&cfg)?, &dir)?;
        }
        Command::Robustness { config, out } => {
            let cfg = ExperimentConfig::read(&config)?;
            let dir = output_dir(&cfg, out)?;
            report(&run_robustness(&cfg)?, &dir)?;
        }
    }
    Ok(())
}

fn load_network(path: &Path) -> Result<understudy::bn::DiscreteBayesNet> {
    read_network(path).with_context(|| format!("loading network {}", path.display()))
}

/// A checkpoint, or failing that a network file.
fn load_predictor(path: &Path) -> Result<Box<dyn Predictor>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match Checkpoint::from_json(&text) {
        Ok(ckpt) => Ok(Box::new(UnderstudyModel::from_checkpoint(&ckpt)?)),
        Err(ckpt_err) => match network_from_json(&text) {
            Ok(net) => Ok(Box::new(net)),
            Err(net_err) => bail!(
                "{} is neither a checkpoint ({ckpt_err}) nor a network ({net_err})",
                path.display()
            ),
        },
    }
}

fn print_report(r: &MaeReport, skipped: usize) {
    println!("queries {}", r.per_query.len());
    println!("mae {:.6}", r.mean);
    println!("convention {}", r.convention);
    println!("fallbacks {}", r.fallback_count);
    println!("empty_evidence {}", r.empty_evidence_queries);
    if skipped > 0 {
        println!("skipped_impossible {skipped}");
    }
}

fn output_dir(cfg: &ExperimentConfig, out: Option<PathBuf>) -> Result<PathBuf> {
    match out.or_else(|| cfg.output_dir.clone()) {
        Some(dir) => Ok(dir),
        None => bail!("no output directory: set `output_dir` in the config or pass --out"),
    }
}

fn report(records: &[RunRecord], dir: &Path) -> Result<()> {
    let (runs, summary) = emit_reports(records, dir)?;
    println!("{} runs", records.len());
    println!("wrote {}", runs.display());
    println!("wrote {}", summary.display());
    Ok(())
}
