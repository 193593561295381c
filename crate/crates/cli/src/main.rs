fn main() -> std::process::ExitCode {
    opuc_cli::main_entry()
}
