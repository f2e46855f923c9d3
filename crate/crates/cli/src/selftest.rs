use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;

use crate::args::Cli;
use crate::commands::execute;
use crate::error::CliError;

/// Example invocations per command, checked against `golden/<command>/<i>.txt`.
pub fn examples(command: &str) -> Vec<Vec<&'static str>> {
    match command {
        "exp" => vec![
            vec!["--rule", "1/n!", "--order", "10"],
            vec!["--rule", "1", "--egf", "--order", "8"],
            vec![
                "--rule",
                r#"{"kind":"explicit","values":["0","1","1"]}"#,
                "--order",
                "8",
            ],
        ],
        "log" => vec![vec![
            "--rule",
            r#"{"kind":"explicit","values":["1","1","1/2","1/6","1/24"]}"#,
            "--order",
            "4",
        ]],
        "euler" => vec![
            vec!["--rule", "1", "--order", "15"],
            vec![
                "--rule",
                r#"{"kind":"builtin","tag":"broom-unlabelled"}"#,
                "--order",
                "12",
            ],
        ],
        "ratios" => vec![vec!["--rule", "1/n!", "--order", "30"]],
        "saddle" => vec![
            vec!["--poly", "x", "--n", "10,20"],
            vec!["--poly", "x^2+x^3", "--n", "20"],
        ],
        "exponent-fit" => vec![vec!["--poly", "x", "--n", "10,100"]],
        "split" => vec![vec!["--rule", "1/n!", "--ell", "2", "--order", "8"]],
        "cr-bound" => vec![
            vec!["--rule", "1/n!", "--ell", "3", "--order", "20"],
            vec!["--rule", "1/n!", "--ell", "2", "--order", "20"],
        ],
        "theorem-demo" => vec![
            vec!["--rule", "1/n!", "--theta", "1/2", "--order", "40"],
            vec!["--rule", "n^n/n!", "--theta", "1/2", "--order", "20"],
        ],
        "counterexample" => vec![vec![
            "--t",
            "n^n/n!",
            "--stages",
            "3",
            "--order",
            "12",
            "--search-cap",
            "40",
        ]],
        "class" => vec![
            vec!["--name", "equivalence-relations", "--order", "20"],
            vec!["--name", "broom", "--order", "30", "--check", "unlabelled"],
        ],
        "oracle" => vec![
            vec!["--class", "equivalence-relations", "--n", "6"],
            vec!["--class", "broom", "--n", "6", "--scope", "connected"],
        ],
        "radius" => vec![
            vec!["--class", "broom", "--order", "120"],
            vec![
                "--rule",
                r#"{"kind":"geometric","c":"1","b":"2"}"#,
                "--order",
                "50",
            ],
        ],
        _ => vec![],
    }
}

pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("golden")
}

/// Report text for one invocation, or the exit status and message on failure.
pub fn run_example(command: &str, args: &[&str]) -> String {
    let argv: Vec<&str> = ["expsmooth", command]
        .into_iter()
        .chain(args.iter().copied())
        .collect();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => return format!("exit 2: {}\n", e.kind()),
    };
    let outcome: Result<String, CliError> =
        execute(&cli.global, &cli.command).and_then(|(cfg, report)| report.render(&cfg));
    match outcome {
        Ok(text) => text,
        Err(e) => format!("exit {}: {e}\n", e.exit_code()),
    }
}

/// Runs the example table; returns whether every case matched.
pub fn run(command: &str, dir: &Path, bless: bool) -> Result<bool, CliError> {
    let cases = examples(command);
    if cases.is_empty() {
        return Err(CliError::Usage(format!(
            "no examples registered for `{command}`"
        )));
    }
    let folder = dir.join(command);
    if bless {
        fs::create_dir_all(&folder).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let mut all = true;
    for (i, args) in cases.iter().enumerate() {
        let path = folder.join(format!("{i}.txt"));
        let got = run_example(command, args);
        let label = format!("{command}[{i}] {}", args.join(" "));
        if bless {
            fs::write(&path, &got).map_err(|e| CliError::Io(e.to_string()))?;
            println!("BLESSED {label}");
            continue;
        }
        match fs::read_to_string(&path) {
            Ok(want) if want == got => println!("PASS {label}"),
            Ok(_) => {
                all = false;
                println!("FAIL {label}: output differs from {}", path.display());
            }
            Err(_) => {
                all = false;
                println!("FAIL {label}: missing golden file {}", path.display());
            }
        }
    }
    Ok(all)
}
