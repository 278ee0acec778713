fn main() {
    std::process::exit(kpp_core::cli::main_exit_code());
}
