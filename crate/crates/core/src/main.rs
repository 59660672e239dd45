fn main() {
    std::process::exit(plasmon_qnet::cli::main_exit_code());
}
