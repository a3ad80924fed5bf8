fn main() {
    std::process::exit(infogeom::cli::run(std::env::args_os()));
}
