fn main() {
    std::process::exit(majorize::cli::run(std::env::args_os()));
}
