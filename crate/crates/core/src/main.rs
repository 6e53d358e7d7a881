fn main() {
    let code = per1lab::cli::run(std::env::args_os());
    std::process::exit(code);
}
