fn main() {
    std::process::exit(scanopt_cli::cli_main(std::env::args_os()));
}
