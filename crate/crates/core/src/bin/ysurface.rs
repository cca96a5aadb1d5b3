fn main() {
    std::process::exit(ysurface::cli::run(std::env::args_os()));
}
