use std::collections::BTreeMap;

use cmhodge::acceptance::{random_nilpotent_blocks, selftest};
use cmhodge::algebra::{generated_subalgebra, regular_nilpotent_blocks, AlgebraElement, HodgeAlgebra};
use cmhodge::cm::{
    enumerate_orientations, grading_vector, validate_orientation, GaloisCMData, Orientation,
    OrientedCMField,
};
use cmhodge::combinatorics::{is_block_system, support_graph, trivial_partition_check};
use cmhodge::verifiers::{escape_verdict, nondegeneracy_verdict, rigidity_verdict};
use cmhodge::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::input;
use crate::{Command, ElementCommand, OrientCommand, SweepArgs};

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

pub fn run(command: &Command, seed: u64) -> Result<(Value, u8)> {
    let value = match command {
        Command::Field(args) => describe_field(&input::field(args)?)?,
        Command::Orient(OrientCommand::Enumerate { field, weight, hodge }) => {
            let g = input::field(field)?;
            let list = enumerate_orientations(&g, *weight, hodge)?;
            json!({
                "field": g.spec(),
                "weight": weight,
                "hodge": hodge,
                "count": list.len(),
                "orientations": list,
            })
        }
        Command::Grading(args) => {
            let f = input::oriented(args)?;
            let a = grading_vector(&f);
            let by_label: BTreeMap<String, i64> = f
                .galois()
                .labels()
                .iter()
                .map(|&l| (l.to_string(), a.get(f.signed_of_label(l).expect("label"))))
                .collect();
            json!({
                "field": f.galois().spec(),
                "orientation": f.orientation(),
                "hodge_numbers": f.orientation().hodge_numbers(),
                "pair_values": a.values(),
                "label_values": by_label,
            })
        }
        Command::Nondeg(args) => sweep(args, |f| Ok(to_value(&nondegeneracy_verdict(f)?)))?,
        Command::Rigidity(args) => sweep(args, |f| Ok(to_value(&rigidity_verdict(f)?)))?,
        Command::Partition { element } => {
            let v = input::element(element)?;
            let (graph, partition) = support_graph(&v);
            let verdict = is_block_system(&partition, v.algebra().field().galois())?;
            let nilpotent = match trivial_partition_check(&v) {
                Ok(r) => to_value(&r),
                Err(Error::NotNilpotent) => Value::Null,
                Err(e) => return Err(e),
            };
            json!({
                "element": v.to_json(),
                "graph": graph,
                "partition": partition,
                "block_verdict": verdict,
                "nilpotent_check": nilpotent,
            })
        }
        Command::Closure { elements } => {
            let (alg, seeds) = input::elements(elements)?;
            let sub = generated_subalgebra(&seeds)?;
            json!({
                "seeds": seeds.len(),
                "dimension": sub.dimension,
                "full_dimension": alg.dimension(),
            })
        }
        Command::Escape { element } => {
            let v = input::element(element)?;
            to_value(&escape_verdict(v.algebra(), &v)?)
        }
        Command::Element(cmd) => build_element(cmd, seed)?,
        Command::Selftest => {
            let report = selftest(seed);
            let code = if report.passed { 0 } else { 4 };
            return Ok((to_value(&report), code));
        }
    };
    Ok((value, 0))
}

fn describe_field(g: &GaloisCMData) -> Result<Value> {
    let conj = g.conjugation();
    let pairs: Vec<[u64; 2]> = g
        .labels()
        .iter()
        .enumerate()
        .map(|(pos, &l)| [l, g.label(conj.apply(pos))])
        .filter(|[a, b]| a < b)
        .collect();
    let generators: Vec<Vec<u64>> = g
        .generators()
        .iter()
        .map(|s| (0..g.degree()).map(|pos| g.label(s.apply(pos))).collect())
        .collect();
    Ok(json!({
        "field": g.spec(),
        "degree": g.degree(),
        "n": g.degree() / 2,
        "labels": g.labels(),
        "conjugate_pairs": pairs,
        "generators": generators,
        "group_order": g.elements()?.len(),
        "working_conductor": g.working_conductor(),
    }))
}

/// One orientation, or every orientation with the given Hodge numbers in parallel.
fn sweep(args: &SweepArgs, check: impl Fn(&OrientedCMField) -> Result<Value> + Sync) -> Result<Value> {
    let g = input::field(&args.field)?;
    match (&args.orientation, &args.hodge) {
        (Some(o), _) => {
            let f = validate_orientation(&g, &input::orientation(o, args.weight)?)?;
            let mut out = check(&f)?;
            if let Value::Object(map) = &mut out {
                map.insert("field".into(), to_value(&g.spec()));
                map.insert("orientation".into(), to_value(f.orientation()));
            }
            Ok(out)
        }
        (None, Some(h)) => {
            let weight = args
                .weight
                .ok_or_else(|| Error::Usage("--hodge needs --weight".into()))?;
            let list: Vec<Orientation> = enumerate_orientations(&g, weight, h)?;
            let results = list
                .par_iter()
                .map(|o| {
                    let report = check(&validate_orientation(&g, o)?)?;
                    Ok(json!({ "orientation": o, "report": report }))
                })
                .collect::<Result<Vec<Value>>>()?;
            Ok(json!({
                "field": g.spec(),
                "weight": weight,
                "hodge": h,
                "count": results.len(),
                "results": results,
            }))
        }
        (None, None) => Err(Error::Usage("give --orientation or --hodge".into())),
    }
}

fn build_element(cmd: &ElementCommand, seed: u64) -> Result<Value> {
    match cmd {
        ElementCommand::Root { oriented, i, j } => {
            let alg = HodgeAlgebra::new(input::oriented(oriented)?);
            Ok(to_value(&AlgebraElement::root_vector(&alg, *i, *j)?.to_json()))
        }
        ElementCommand::Nilpotent { oriented, random } => {
            let alg = HodgeAlgebra::new(input::oriented(oriented)?);
            let (a, b) = if *random {
                random_nilpotent_blocks(alg.n(), &mut ChaCha8Rng::seed_from_u64(seed))
            } else {
                regular_nilpotent_blocks(alg.n())
            };
            let v = AlgebraElement::rational_nilpotent(&alg, &a, &b)?;
            let mut out = to_value(&v.to_json());
            out["nilpotency_degree"] = json!(v.nilpotency_degree()?);
            Ok(out)
        }
        ElementCommand::Average { element } => {
            let avg = input::element(element)?.reynolds_average()?;
            let mut out = to_value(&avg.element.to_json());
            out["expected_support"] = to_value(&avg.expected_support);
            out["cancelled"] = to_value(&avg.cancelled);
            Ok(out)
        }
    }
}
