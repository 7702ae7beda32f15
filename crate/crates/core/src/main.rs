fn main() {
    std::process::exit(paretoscope::cli::run(std::env::args_os()));
}
