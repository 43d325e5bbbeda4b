//! Example programs shipped with the compiler, keyed by name.

macro_rules! corpus {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../corpus/", $name, ".flo")))),*]
    };
}

pub const ALL: &[(&str, &str)] = corpus![
    "diamond",
    "gaussian",
    "laplace",
    "mean_filter",
    "sobel",
    "harris",
    "jacobi",
    "square",
    "filter_chain",
    "unsharp_mask",
    "lucas_kanade",
    "independent5",
];

pub fn get(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}
