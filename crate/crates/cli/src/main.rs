use std::process::ExitCode;

use clap::Parser;
use dicke_tool::args::{resolve, Cli};
use dicke_tool::run;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("config error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = resolve(&cli).and_then(|(command, cfg)| run(&command, &cfg, &cli.out));
    match result {
        Ok(out) => {
            println!("{}", out.report_path.display());
            for p in &out.plot_paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
