fn main() {
    std::process::exit(poetbench::cli::run(std::env::args_os()));
}
