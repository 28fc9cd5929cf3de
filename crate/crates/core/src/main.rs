fn main() {
    std::process::exit(schottky_lab::cli::run(std::env::args_os()));
}
