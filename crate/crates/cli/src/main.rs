fn main() {
    println!("patchbound");
}
