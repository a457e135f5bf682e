/// A benchmark matrix and where to obtain it.
#[derive(Clone, Copy, Debug)]
pub struct DatasetInfo {
    pub name: &'static str,
    /// Samples x features.
    pub shape: (usize, usize),
    pub nnz: usize,
    pub source: &'static str,
    pub note: &'static str,
}

/// Matrices used by the benchmark configurations. Nothing is downloaded automatically.
pub const DATASETS: &[DatasetInfo] = &[
    DatasetInfo {
        name: "lpsc105",
        shape: (105, 163),
        nnz: 340,
        source: "https://sparse.tamu.edu/LPnetlib/lp_sc105",
        note: "bundled as data/lpsc105.mtx",
    },
    DatasetInfo {
        name: "trek10",
        shape: (104, 478),
        nnz: 8612,
        source: "https://sparse.tamu.edu (search: trek10)",
        note: "save as trek10.mtx",
    },
    DatasetInfo {
        name: "CNAE",
        shape: (1080, 856),
        nnz: 7233,
        source: "https://archive.ics.uci.edu (search: CNAE-9)",
        note: "drop the label column, samples as rows; save as cnae.mtx",
    },
    DatasetInfo {
        name: "micromass",
        shape: (360, 1300),
        nnz: 48713,
        source: "https://archive.ics.uci.edu (search: MicroMass)",
        note: "samples as rows; save as micromass.mtx",
    },
    DatasetInfo {
        name: "DrivFace",
        shape: (606, 6400),
        nnz: 3_878_400,
        source: "https://archive.ics.uci.edu (search: DrivFace)",
        note: "dense; Matrix Market array format is accepted",
    },
    DatasetInfo {
        name: "air04",
        shape: (823, 8904),
        nnz: 72965,
        source: "https://sparse.tamu.edu (search: air04)",
        note: "save as air04.mtx",
    },
    DatasetInfo {
        name: "arcene",
        shape: (100, 10000),
        nnz: 540_941,
        source: "https://archive.ics.uci.edu (search: Arcene)",
        note: "training split, samples as rows; save as arcene.mtx",
    },
];

/// Directory searched for dataset files: `FEATMG_DATA_DIR` or `./data`.
pub fn data_dir() -> std::path::PathBuf {
    std::env::var_os("FEATMG_DATA_DIR")
        .map(Into::into)
        .unwrap_or_else(|| "data".into())
}
