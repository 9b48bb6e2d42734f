use serde::{Deserialize, Serialize};

use super::spec::{Architecture, CnnSpec, MlpSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensorKind {
    Weight,
    Bias,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSlot {
    pub name: String,
    pub shape: Vec<usize>,
    pub kind: TensorKind,
    pub offset: usize,
    /// Xavier fans for weights.
    pub fans: (usize, usize),
}

impl TensorSlot {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }
}

/// Placement of every named tensor inside one flat parameter vector.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParamLayout {
    pub slots: Vec<TensorSlot>,
    pub total: usize,
}

impl ParamLayout {
    fn push(&mut self, name: String, shape: Vec<usize>, kind: TensorKind, fans: (usize, usize)) -> usize {
        let offset = self.total;
        let slot = TensorSlot {
            name,
            shape,
            kind,
            offset,
            fans,
        };
        self.total += slot.len();
        self.slots.push(slot);
        offset
    }

    pub fn for_architecture(arch: &Architecture) -> (Self, Offsets) {
        let mut layout = ParamLayout::default();
        let offsets = match arch {
            Architecture::Mlp(m) => Offsets {
                conv_x: Vec::new(),
                conv_y: Vec::new(),
                dense: layout.push_dense(m),
            },
            Architecture::Cnn(c) => {
                let conv_x = layout.push_conv("conv_x", c);
                let conv_y = layout.push_conv("conv_y", c);
                let dense = layout.push_dense(&c.head());
                Offsets {
                    conv_x,
                    conv_y,
                    dense,
                }
            }
        };
        (layout, offsets)
    }

    fn push_dense(&mut self, m: &MlpSpec) -> Vec<LayerOffsets> {
        m.layer_dims()
            .into_iter()
            .enumerate()
            .map(|(k, (fan_in, fan_out))| LayerOffsets {
                weight: self.push(
                    format!("dense{k}.weight"),
                    vec![fan_out, fan_in],
                    TensorKind::Weight,
                    (fan_in, fan_out),
                ),
                bias: self.push(format!("dense{k}.bias"), vec![fan_out], TensorKind::Bias, (0, 0)),
            })
            .collect()
    }

    fn push_conv(&mut self, prefix: &str, c: &CnnSpec) -> Vec<LayerOffsets> {
        let k = c.conv.kernel;
        c.conv
            .layer_channels()
            .into_iter()
            .enumerate()
            .map(|(layer, (cin, cout))| LayerOffsets {
                weight: self.push(
                    format!("{prefix}{layer}.weight"),
                    vec![cout, cin, k],
                    TensorKind::Weight,
                    (cin * k, cout * k),
                ),
                bias: self.push(format!("{prefix}{layer}.bias"), vec![cout], TensorKind::Bias, (0, 0)),
            })
            .collect()
    }

    pub fn weight_ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.slots
            .iter()
            .filter(|s| s.kind == TensorKind::Weight)
            .map(|s| s.range())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerOffsets {
    pub weight: usize,
    pub bias: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Offsets {
    pub conv_x: Vec<LayerOffsets>,
    pub conv_y: Vec<LayerOffsets>,
    pub dense: Vec<LayerOffsets>,
}
