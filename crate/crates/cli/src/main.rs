fn main() {
    let code = ule_cli::run(std::env::args_os());
    std::process::exit(code);
}
