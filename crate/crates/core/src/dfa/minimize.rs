use std::collections::{HashMap, VecDeque};

use super::Dfa;

/// Moore partition refinement followed by breadth-first renumbering of the
/// quotient. Preserves the language (including the empty word).
pub fn minimize(d: &Dfa) -> Dfa {
    let n = d.num_states();
    let w = d.width();
    let mut block: Vec<u32> = d.finals.iter().map(|&f| u32::from(f)).collect();
    let mut count = block.iter().collect::<std::collections::HashSet<_>>().len();
    loop {
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut next = Vec::with_capacity(n);
        for q in 0..n {
            let mut sig = Vec::with_capacity(w + 1);
            sig.push(block[q]);
            sig.extend(d.table[q * w..(q + 1) * w].iter().map(|&s| block[s as usize]));
            let fresh = ids.len() as u32;
            next.push(*ids.entry(sig).or_insert(fresh));
        }
        let new_count = ids.len();
        block = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }

    let mut rep = vec![usize::MAX; count];
    for q in (0..n).rev() {
        rep[block[q] as usize] = q;
    }
    let mut order = vec![u32::MAX; count];
    let mut seq = Vec::with_capacity(count);
    let start = block[d.initial] as usize;
    order[start] = 0;
    seq.push(start);
    let mut queue = VecDeque::from([start]);
    while let Some(b) = queue.pop_front() {
        let q = rep[b];
        for m in 0..w {
            let nb = block[d.table[q * w + m] as usize] as usize;
            if order[nb] == u32::MAX {
                order[nb] = seq.len() as u32;
                seq.push(nb);
                queue.push_back(nb);
            }
        }
    }

    let mut table = Vec::with_capacity(seq.len() * w);
    let mut finals = Vec::with_capacity(seq.len());
    for &b in &seq {
        let q = rep[b];
        finals.push(d.finals[q]);
        table.extend(
            d.table[q * w..(q + 1) * w]
                .iter()
                .map(|&s| order[block[s as usize] as usize]),
        );
    }
    Dfa::from_table(d.fluents.clone(), d.support.clone(), 0, finals, table)
}
