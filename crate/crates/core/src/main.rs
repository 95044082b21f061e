fn main() {
    std::process::exit(gridrule::cli::run(std::env::args_os()));
}
