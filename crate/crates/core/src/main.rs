fn main() {
    std::process::exit(qmbs::cli::run_main(std::env::args_os()));
}
