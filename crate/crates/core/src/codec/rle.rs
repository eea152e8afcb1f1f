use crate::error::{Error, Result};

/// `(count, value)` byte pairs with `count` in `1..=255`.
pub fn rle_encode(data: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    let mut iter = data.iter().copied().peekable();
    while let Some(value) = iter.next() {
        let mut count = 1u8;
        while count < u8::MAX && iter.peek() == Some(&value) {
            iter.next();
            count += 1;
        }
        out.push(count);
        out.push(value);
    }
    out
}

pub fn rle_decode(data: &[u8]) -> Result<Vec<u8>> {
    if !data.len().is_multiple_of(2) {
        return Err(Error::stream(data.len() - 1, "odd length: dangling count byte"));
    }
    let mut out = Vec::with_capacity(data.len());
    for (i, pair) in data.chunks_exact(2).enumerate() {
        let (count, value) = (pair[0], pair[1]);
        if count == 0 {
            return Err(Error::stream(i * 2, "zero run length"));
        }
        out.extend(std::iter::repeat_n(value, count as usize));
    }
    Ok(out)
}
