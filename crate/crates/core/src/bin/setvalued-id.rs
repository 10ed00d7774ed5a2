fn main() { setvalued_id::cli::main() }
