//! Seeded random formulas for property tests and soundness fuzzing.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Formula, LanguageTag, Vocabulary};

/// Shape parameters for random formulas.
#[derive(Clone, Debug)]
pub struct FormulaGen {
    pub agents: Vec<String>,
    pub props: Vec<String>,
    pub constants: Vec<String>,
    pub language: LanguageTag,
    /// Upper bound on [`Formula::modal_depth`].
    pub modal_depth: usize,
    /// Upper bound on boolean nesting between two modal layers.
    pub boolean_depth: usize,
}

impl FormulaGen {
    pub fn new(vocab: &Vocabulary, language: LanguageTag, modal_depth: usize) -> FormulaGen {
        FormulaGen {
            agents: vocab.agents().to_vec(),
            props: vocab.props().to_vec(),
            constants: vocab.constants().to_vec(),
            language,
            modal_depth,
            boolean_depth: 2,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Formula {
        self.gen(rng, self.modal_depth, self.boolean_depth)
    }

    fn gen<R: Rng + ?Sized>(&self, rng: &mut R, modal: usize, boolean: usize) -> Formula {
        #[derive(Clone, Copy)]
        enum Shape {
            Top,
            Prop,
            Neg,
            And,
            Box,
            Kv,
            Unary,
            Binary,
        }
        let mut shapes = vec![Shape::Top, Shape::Prop, Shape::Prop];
        if boolean > 0 {
            shapes.extend([Shape::Neg, Shape::And]);
        }
        if modal > 0 {
            shapes.push(Shape::Box);
            match self.language {
                LanguageTag::ELKvR => shapes.push(Shape::Kv),
                LanguageTag::MLKvR | LanguageTag::MLKv => shapes.push(Shape::Unary),
                LanguageTag::MLKvB => shapes.push(Shape::Binary),
            }
        }
        match *shapes.choose(rng).expect("non-empty") {
            Shape::Top => Formula::Top,
            Shape::Prop => Formula::prop(self.props.choose(rng).expect("props").clone()),
            Shape::Neg => Formula::neg(self.gen(rng, modal, boolean - 1)),
            Shape::And => {
                let a = self.gen(rng, modal, boolean - 1);
                let b = self.gen(rng, modal, boolean - 1);
                Formula::and(a, b)
            }
            Shape::Box => {
                let i = self.agents.choose(rng).expect("agents").clone();
                Formula::boxed(i, self.gen(rng, modal - 1, self.boolean_depth))
            }
            Shape::Kv => {
                let i = self.agents.choose(rng).expect("agents").clone();
                let c = self.constants.choose(rng).expect("constants").clone();
                Formula::kv(i, self.gen(rng, modal - 1, self.boolean_depth), c)
            }
            Shape::Unary => {
                let i = self.agents.choose(rng).expect("agents").clone();
                let c = self.constants.choose(rng).expect("constants").clone();
                if self.language == LanguageTag::MLKv {
                    Formula::bbox_u(i, c, Formula::bot())
                } else {
                    Formula::bbox_u(i, c, self.gen(rng, modal - 1, self.boolean_depth))
                }
            }
            Shape::Binary => {
                let i = self.agents.choose(rng).expect("agents").clone();
                let c = self.constants.choose(rng).expect("constants").clone();
                let a = self.gen(rng, modal - 1, self.boolean_depth);
                let b = self.gen(rng, modal - 1, self.boolean_depth);
                Formula::bbox_b(i, c, a, b)
            }
        }
    }
}
