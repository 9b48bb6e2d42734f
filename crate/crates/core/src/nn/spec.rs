use serde::{Deserialize, Serialize};

/// Control outputs: four wheel torques then the steering angle.
pub const OUTPUT_DIM: usize = 5;
/// State features fed to both architectures.
pub const STATE_FEATURES: usize = 11;
pub const DEFAULT_HIDDEN: [usize; 5] = [32, 32, 128, 32, 128];
pub const DEFAULT_SIGNAL_LEN: usize = 301;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    /// Widths of the rectified hidden layers; the output layer is affine.
    pub hidden: Vec<usize>,
    pub output_dim: usize,
}

impl MlpSpec {
    /// Default network over 11 state features and a 301-point trajectory.
    pub fn paper_default() -> Self {
        Self::with_hidden(DEFAULT_HIDDEN.to_vec())
    }

    pub fn with_hidden(hidden: Vec<usize>) -> Self {
        Self {
            input_dim: STATE_FEATURES + 2 * DEFAULT_SIGNAL_LEN,
            hidden,
            output_dim: OUTPUT_DIM,
        }
    }

    /// `(fan_in, fan_out)` of every dense layer, input to output.
    pub fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = Vec::with_capacity(self.hidden.len() + 1);
        let mut prev = self.input_dim;
        for &w in self.hidden.iter().chain(std::iter::once(&self.output_dim)) {
            dims.push((prev, w));
            prev = w;
        }
        dims
    }
}

/// Per-channel convolution stack: each layer is a same-padded stride-1
/// convolution, average pooling, then a rectifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvStackSpec {
    /// Feature maps of each convolution layer.
    pub channels: Vec<usize>,
    pub kernel: usize,
    pub pool: usize,
}

impl Default for ConvStackSpec {
    fn default() -> Self {
        Self {
            channels: vec![4, 4, 1],
            kernel: 3,
            pool: 2,
        }
    }
}

impl ConvStackSpec {
    /// Signal length after each layer; pooling drops an incomplete tail.
    pub fn lengths(&self, signal_len: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.channels.len() + 1);
        let mut len = signal_len;
        out.push(len);
        for _ in &self.channels {
            len /= self.pool;
            out.push(len);
        }
        out
    }

    pub fn output_len(&self, signal_len: usize) -> usize {
        self.channels.last().copied().unwrap_or(1) * self.lengths(signal_len).last().copied().unwrap_or(0)
    }

    /// `(in_channels, out_channels)` of every layer.
    pub fn layer_channels(&self) -> Vec<(usize, usize)> {
        let mut prev = 1;
        self.channels
            .iter()
            .map(|&c| {
                let pair = (prev, c);
                prev = c;
                pair
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnnSpec {
    pub state_dim: usize,
    pub signal_len: usize,
    /// Shared shape of the X and Y stacks; their weights are disjoint.
    pub conv: ConvStackSpec,
    pub hidden: Vec<usize>,
    pub output_dim: usize,
}

impl CnnSpec {
    pub fn paper_default() -> Self {
        Self {
            state_dim: STATE_FEATURES,
            signal_len: DEFAULT_SIGNAL_LEN,
            conv: ConvStackSpec::default(),
            hidden: DEFAULT_HIDDEN.to_vec(),
            output_dim: OUTPUT_DIM,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.state_dim + 2 * self.signal_len
    }

    pub fn head(&self) -> MlpSpec {
        MlpSpec {
            input_dim: self.state_dim + 2 * self.conv.output_len(self.signal_len),
            hidden: self.hidden.clone(),
            output_dim: self.output_dim,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Architecture {
    Mlp(MlpSpec),
    Cnn(CnnSpec),
}

impl Architecture {
    pub fn input_dim(&self) -> usize {
        match self {
            Architecture::Mlp(m) => m.input_dim,
            Architecture::Cnn(c) => c.input_dim(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            Architecture::Mlp(m) => m.output_dim,
            Architecture::Cnn(c) => c.output_dim,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Architecture::Mlp(_) => "mlp",
            Architecture::Cnn(_) => "cnn",
        }
    }
}
