fn main() {
    std::process::exit(semireg_cli::dispatch(std::env::args_os()));
}
