fn main() {
    if let Err(e) = cssnmf::cli::run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
