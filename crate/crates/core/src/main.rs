use clap::Parser;

fn main() {
    let cli = dehaze::cli::Cli::parse();
    match dehaze::cli::run(cli) {
        Ok(report) => println!("{}", serde_json::to_string_pretty(&report).expect("serializable")),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(dehaze::cli::exit_code(&err));
        }
    }
}
