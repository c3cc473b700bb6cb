fn main() {
    std::process::exit(bandex::cli::run(std::env::args_os()));
}
