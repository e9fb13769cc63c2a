use clap::Parser;
use sparsehom_cli::{emit, run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("sparsehom: --threads: {e}");
            std::process::exit(1);
        }
    }
    let out = run(&cli);
    if let Some(e) = out.json.get("error").and_then(|e| e.as_str()) {
        eprintln!("sparsehom: {e}");
    }
    if let Err(e) = emit(&cli, &out) {
        eprintln!("sparsehom: writing output: {e}");
        std::process::exit(1);
    }
    std::process::exit(out.status.exit_code());
}
