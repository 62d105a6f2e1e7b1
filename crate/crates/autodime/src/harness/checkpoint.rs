//! Flat binary checkpoints.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic   8 bytes  "ADMZCKPT"
//! version u32      1
//! config  u32 length + UTF-8 text (the full experiment config echo)
//! count   u32      number of networks (5)
//! per network:
//!   name        u32 length + UTF-8 ("policy", "value1", "value2",
//!               "clone", "teacher")
//!   layer dims  u32 count + u32 each
//!   step_count  u64  optimizer steps taken
//!   params      u64 count + f64 each (per layer: row-major weights, then
//!               biases — the `Mlp::params` order)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::agent::student::StudentBundle;
use crate::env::sim::{Action, OBSERVATION_DIM};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::nn::Mlp;
use crate::teacher::policy::TeacherPolicy;

const MAGIC: &[u8; 8] = b"ADMZCKPT";
const VERSION: u32 = 1;

struct NetRecord<'a> {
    name: &'static str,
    net: &'a Mlp,
    steps: u64,
}

fn write_u32(w: &mut impl Write, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_u64(w: &mut impl Write, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn write_net(w: &mut impl Write, record: &NetRecord) -> Result<()> {
    write_u32(w, record.name.len() as u32)?;
    w.write_all(record.name.as_bytes())?;
    let dims = record.net.layer_dims();
    write_u32(w, dims.len() as u32)?;
    for &d in dims {
        write_u32(w, d as u32)?;
    }
    write_u64(w, record.steps)?;
    let params = record.net.params();
    write_u64(w, params.len() as u64)?;
    for p in params {
        w.write_all(&p.to_le_bytes())?;
    }
    Ok(())
}

struct LoadedNet {
    name: String,
    dims: Vec<usize>,
    steps: u64,
    params: Vec<f64>,
}

fn read_net(r: &mut impl Read) -> Result<LoadedNet> {
    let name_len = read_u32(r)? as usize;
    let mut name = vec![0u8; name_len];
    r.read_exact(&mut name)?;
    let name = String::from_utf8(name).map_err(|_| Error::Parse("bad net name".into()))?;
    let dim_count = read_u32(r)? as usize;
    let mut dims = Vec::with_capacity(dim_count);
    for _ in 0..dim_count {
        dims.push(read_u32(r)? as usize);
    }
    let steps = read_u64(r)?;
    let param_count = read_u64(r)? as usize;
    let mut params = Vec::with_capacity(param_count);
    let mut buf = [0u8; 8];
    for _ in 0..param_count {
        r.read_exact(&mut buf)?;
        params.push(f64::from_le_bytes(buf));
    }
    Ok(LoadedNet {
        name,
        dims,
        steps,
        params,
    })
}

/// Writes the four student networks plus the teacher, with the config echo.
pub fn save_checkpoint(
    path: &Path,
    cfg: &ExperimentConfig,
    student: &StudentBundle,
    teacher: &TeacherPolicy,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    write_u32(&mut w, VERSION)?;
    let config_text = cfg.to_text();
    write_u32(&mut w, config_text.len() as u32)?;
    w.write_all(config_text.as_bytes())?;

    let steps = student.optimizer_steps();
    let records = [
        NetRecord {
            name: "policy",
            net: &student.policy,
            steps: steps[0],
        },
        NetRecord {
            name: "value1",
            net: &student.value_nets[0],
            steps: steps[1],
        },
        NetRecord {
            name: "value2",
            net: &student.value_nets[1],
            steps: steps[2],
        },
        NetRecord {
            name: "clone",
            net: &student.clone_policy,
            steps: steps[3],
        },
        NetRecord {
            name: "teacher",
            net: teacher.network(),
            steps: teacher.optimizer_steps(),
        },
    ];
    write_u32(&mut w, records.len() as u32)?;
    for record in &records {
        write_net(&mut w, record)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a checkpoint back into a fresh student bundle and teacher policy.
pub fn load_checkpoint(path: &Path) -> Result<(ExperimentConfig, StudentBundle, TeacherPolicy)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Parse("not a checkpoint file".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Parse(format!("unsupported checkpoint version {version}")));
    }
    let config_len = read_u32(&mut r)? as usize;
    let mut config_bytes = vec![0u8; config_len];
    r.read_exact(&mut config_bytes)?;
    let config_text =
        String::from_utf8(config_bytes).map_err(|_| Error::Parse("bad config text".into()))?;
    let cfg = ExperimentConfig::parse(&config_text)?;

    let count = read_u32(&mut r)? as usize;
    if count != 5 {
        return Err(Error::Parse(format!("expected 5 networks, found {count}")));
    }

    let mut student = StudentBundle::new(OBSERVATION_DIM, Action::COUNT, &cfg.student, cfg.seed)?;
    let mut teacher = TeacherPolicy::new(cfg.env.height, cfg.env.width, &cfg.teacher, cfg.seed)?;
    let mut student_steps = student.optimizer_steps();

    for _ in 0..count {
        let loaded = read_net(&mut r)?;
        let target: &mut Mlp = match loaded.name.as_str() {
            "policy" => &mut student.policy,
            "value1" => &mut student.value_nets[0],
            "value2" => &mut student.value_nets[1],
            "clone" => &mut student.clone_policy,
            "teacher" => teacher.network_mut(),
            other => return Err(Error::Parse(format!("unknown network '{other}'"))),
        };
        if target.layer_dims() != loaded.dims.as_slice() {
            return Err(Error::Parse(format!(
                "network '{}' dims {:?} do not match config-derived dims {:?}",
                loaded.name,
                loaded.dims,
                target.layer_dims()
            )));
        }
        target.set_params(&loaded.params)?;
        match loaded.name.as_str() {
            "policy" => student_steps[0] = loaded.steps,
            "value1" => student_steps[1] = loaded.steps,
            "value2" => student_steps[2] = loaded.steps,
            "clone" => student_steps[3] = loaded.steps,
            _ => teacher.set_optimizer_steps(loaded.steps),
        }
    }
    student.set_optimizer_steps(student_steps);
    Ok((cfg, student, teacher))
}
