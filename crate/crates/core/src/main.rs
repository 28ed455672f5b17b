fn main() {
    std::process::exit(wreathcount::cli::main_exit_code());
}
