//! Tag-stream and histogram serialization.
//!
//! # Binary tag format (`TTG1`)
//!
//! Little-endian, 25-byte header followed by raw records:
//!
//! | offset | size | field                                      |
//! |--------|------|--------------------------------------------|
//! | 0      | 4    | magic `b"TTG1"`                            |
//! | 4      | 2    | format version, `u16` (currently 1)        |
//! | 6      | 2    | reserved, written as 0, ignored on read    |
//! | 8      | 8    | tick resolution in picoseconds, `u64`      |
//! | 16     | 1    | channel id, `u8`                           |
//! | 17     | 8    | record count, `u64`                        |
//! | 25     | 8·n  | timestamps in ticks, `u64` each            |
//!
//! Timestamps are converted to picoseconds by multiplying with the
//! resolution; the writer always uses a resolution of 1. Records must be
//! strictly increasing. The stream duration is defined as the last
//! timestamp (zero for an empty file); readers that need the true
//! acquisition window length should carry it out of band.
//!
//! Malformed inputs are reported with distinct errors: a bad magic,
//! unsupported version, zero resolution, short header, or a timestamp that
//! overflows the signed picosecond range yield [`Error::MalformedHeader`];
//! fewer records than declared yield [`Error::TruncatedRecord`]; surplus
//! bytes yield [`Error::TrailingData`]; out-of-order records yield
//! [`Error::NonMonotonicTimestamp`].
//!
//! # Text tag format
//!
//! One record per line, `channel<TAB>timestamp_ps`, sorted by timestamp.
//! Blank lines and lines starting with `#` are skipped. Several channels
//! may share one file; [`read_tags_text`] extracts one of them. The
//! duration of every extracted stream is the largest timestamp in the
//! file, so channels read from the same acquisition report the same
//! observation window.
//!
//! # Histogram CSV
//!
//! Header `tau_s,g2,sigma,counts`, one row per bin. Lag and estimate
//! columns are printed with nine significant digits. Histograms without
//! rate normalization carry no estimate, and write zeros in the `g2` and
//! `sigma` columns.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::correlator::CorrelationHistogram;
use crate::error::{Error, Result};
use crate::tags::TagStream;

const MAGIC: [u8; 4] = *b"TTG1";
const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 25;

// ---------------------------------------------------------------------------
// binary format
// ---------------------------------------------------------------------------

/// Writes a tag stream to `path` in the binary `TTG1` format.
pub fn write_tags(path: impl AsRef<Path>, stream: &TagStream) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_tags_to(&mut w, stream).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_tags_to(w: &mut impl Write, stream: &TagStream) -> std::io::Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&0u16.to_le_bytes())?;
    w.write_all(&1u64.to_le_bytes())?; // resolution: 1 ps per tick
    w.write_all(&[stream.channel()])?;
    w.write_all(&(stream.len() as u64).to_le_bytes())?;
    for &t in stream.tags() {
        w.write_all(&(t as u64).to_le_bytes())?;
    }
    Ok(())
}

/// Reads a binary `TTG1` tag file.
pub fn read_tags(path: impl AsRef<Path>) -> Result<TagStream> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    BufReader::new(file)
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(path, e))?;
    read_tags_from(&bytes)
}

fn read_tags_from(bytes: &[u8]) -> Result<TagStream> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::MalformedHeader(format!(
            "file holds {} bytes, header needs {HEADER_LEN}",
            bytes.len()
        )));
    }
    if bytes[0..4] != MAGIC {
        return Err(Error::MalformedHeader(format!(
            "bad magic {:02x?}, expected {:02x?}",
            &bytes[0..4],
            MAGIC
        )));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(Error::MalformedHeader(format!(
            "unsupported format version {version}"
        )));
    }
    let resolution = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    if resolution == 0 {
        return Err(Error::MalformedHeader("tick resolution is zero".into()));
    }
    let channel = bytes[16];
    let declared = u64::from_le_bytes(bytes[17..25].try_into().unwrap());

    let body = &bytes[HEADER_LEN..];
    let available = (body.len() / 8) as u64;
    if available < declared {
        return Err(Error::TruncatedRecord {
            expected: declared,
            got: available,
        });
    }
    if body.len() as u64 > declared.saturating_mul(8) {
        return Err(Error::TrailingData);
    }

    let mut tags = Vec::with_capacity(declared as usize);
    let mut prev: i64 = -1;
    for (index, chunk) in body.chunks_exact(8).enumerate() {
        let ticks = u64::from_le_bytes(chunk.try_into().unwrap());
        let ps = ticks
            .checked_mul(resolution)
            .filter(|&p| p <= i64::MAX as u64)
            .ok_or_else(|| {
                Error::MalformedHeader(format!(
                    "record {index}: {ticks} ticks at resolution {resolution} ps \
                     overflows the signed picosecond range"
                ))
            })? as i64;
        if ps <= prev {
            return Err(Error::NonMonotonicTimestamp {
                index: index as u64,
            });
        }
        prev = ps;
        tags.push(ps);
    }
    let duration_ps = tags.last().copied().unwrap_or(0);
    Ok(TagStream::from_raw_unchecked(channel, tags, duration_ps))
}

/// Returns true when `path` starts with the binary tag-file magic.
///
/// Used to route files to [`read_tags`] or [`read_tags_text`].
pub fn is_binary_tag_file(path: impl AsRef<Path>) -> Result<bool> {
    let path = path.as_ref();
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut head = [0u8; 4];
    let mut filled = 0;
    while filled < head.len() {
        match file.read(&mut head[filled..]) {
            Ok(0) => return Ok(false),
            Ok(n) => filled += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(Error::io(path, e)),
        }
    }
    Ok(head == MAGIC)
}

// ---------------------------------------------------------------------------
// text format
// ---------------------------------------------------------------------------

/// Writes one or more tag streams to `path` as tab-separated text, merged
/// in timestamp order.
pub fn write_tags_text(path: impl AsRef<Path>, streams: &[&TagStream]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_tags_text_to(&mut w, streams).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writer-generic form of [`write_tags_text`].
pub fn write_tags_text_to(w: &mut impl Write, streams: &[&TagStream]) -> std::io::Result<()> {
    let mut rows: Vec<(i64, u8)> = Vec::new();
    for s in streams {
        rows.extend(s.tags().iter().map(|&t| (t, s.channel())));
    }
    rows.sort_unstable();
    writeln!(w, "# channel\ttimestamp_ps")?;
    for (t, c) in rows {
        writeln!(w, "{c}\t{t}")?;
    }
    Ok(())
}

/// Reads one channel from a text tag file.
///
/// With `channel: Some(c)` only lines for channel `c` are kept; other
/// channels contribute to the stream duration but not to the tags. With
/// `channel: None` the file must contain a single channel, which is
/// returned as-is. The duration of the returned stream is the largest
/// timestamp anywhere in the file.
pub fn read_tags_text(path: impl AsRef<Path>, channel: Option<u8>) -> Result<TagStream> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut tags: Vec<i64> = Vec::new();
    let mut seen_channel: Option<u8> = None;
    let mut max_ps: i64 = 0;
    for (number, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line_no = number + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(chan_str), Some(ts_str), None) =
            (fields.next(), fields.next(), fields.next())
        else {
            return Err(Error::TextParse {
                line: line_no,
                reason: "expected two fields: channel and timestamp_ps".into(),
            });
        };
        let chan: u8 = chan_str.parse().map_err(|_| Error::TextParse {
            line: line_no,
            reason: format!("invalid channel {chan_str:?}"),
        })?;
        let ps: i64 = ts_str.parse().map_err(|_| Error::TextParse {
            line: line_no,
            reason: format!("invalid timestamp {ts_str:?}"),
        })?;
        if ps < 0 {
            return Err(Error::TextParse {
                line: line_no,
                reason: format!("negative timestamp {ps}"),
            });
        }
        max_ps = max_ps.max(ps);

        let keep = match channel {
            Some(wanted) => chan == wanted,
            None => match seen_channel {
                Some(first) if first != chan => {
                    return Err(Error::TextParse {
                        line: line_no,
                        reason: format!(
                            "second channel {chan} in a file read without a channel \
                             filter (first was {first})"
                        ),
                    });
                }
                _ => {
                    seen_channel = Some(chan);
                    true
                }
            },
        };
        if !keep {
            continue;
        }
        if let Some(&prev) = tags.last() {
            if ps <= prev {
                return Err(Error::TextParse {
                    line: line_no,
                    reason: format!(
                        "timestamp {ps} not greater than previous {prev} on channel {chan}"
                    ),
                });
            }
        }
        tags.push(ps);
    }

    let resolved = channel.or(seen_channel).unwrap_or(0);
    Ok(TagStream::from_raw_unchecked(resolved, tags, max_ps))
}

// ---------------------------------------------------------------------------
// histogram CSV
// ---------------------------------------------------------------------------

/// Writes a correlation histogram to `path` as CSV.
pub fn write_histogram_csv(path: impl AsRef<Path>, hist: &CorrelationHistogram) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_histogram_csv_to(&mut w, hist).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writer-generic form of [`write_histogram_csv`].
pub fn write_histogram_csv_to(
    w: &mut impl Write,
    hist: &CorrelationHistogram,
) -> std::io::Result<()> {
    writeln!(w, "tau_s,g2,sigma,counts")?;
    for (k, (&tau, &counts)) in hist.bin_centers.iter().zip(&hist.counts).enumerate() {
        let g2 = hist.g2.as_ref().map_or(0.0, |v| v[k]);
        let sigma = hist.sigma.as_ref().map_or(0.0, |v| v[k]);
        writeln!(w, "{tau:.8e},{g2:.8e},{sigma:.8e},{counts}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlator::{correlate, CorrelatorConfig, Normalization};
    use crate::tagsim::generate_poisson;

    fn sample_stream() -> TagStream {
        TagStream::new(3, vec![0, 7, 13, 1_000_000], 1_000_000).unwrap()
    }

    fn write_to_vec(stream: &TagStream) -> Vec<u8> {
        let mut buf = Vec::new();
        write_tags_to(&mut buf, stream).unwrap();
        buf
    }

    #[test]
    fn binary_roundtrip_preserves_stream() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tags.ttg");
        let original = sample_stream();
        write_tags(&path, &original).unwrap();
        let back = read_tags(&path).unwrap();
        assert_eq!(back.channel(), original.channel());
        assert_eq!(back.tags(), original.tags());
        assert_eq!(back.duration_ps(), original.duration_ps());
    }

    #[test]
    fn binary_roundtrip_empty_stream() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.ttg");
        let original = TagStream::new(9, vec![], 0).unwrap();
        write_tags(&path, &original).unwrap();
        let back = read_tags(&path).unwrap();
        assert_eq!(back.channel(), 9);
        assert!(back.is_empty());
        assert_eq!(back.duration_ps(), 0);
    }

    #[test]
    fn binary_rejects_bad_magic() {
        let mut bytes = write_to_vec(&sample_stream());
        bytes[0] = b'X';
        assert!(matches!(
            read_tags_from(&bytes),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn binary_rejects_unsupported_version() {
        let mut bytes = write_to_vec(&sample_stream());
        bytes[4] = 2;
        assert!(matches!(
            read_tags_from(&bytes),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn binary_rejects_short_header() {
        let bytes = write_to_vec(&sample_stream());
        assert!(matches!(
            read_tags_from(&bytes[..10]),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn binary_rejects_zero_resolution() {
        let mut bytes = write_to_vec(&sample_stream());
        bytes[8..16].copy_from_slice(&0u64.to_le_bytes());
        assert!(matches!(
            read_tags_from(&bytes),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn binary_reports_truncation_with_counts() {
        let bytes = write_to_vec(&sample_stream());
        // drop the last record plus one byte of the one before it
        let cut = bytes.len() - 9;
        match read_tags_from(&bytes[..cut]) {
            Err(Error::TruncatedRecord { expected, got }) => {
                assert_eq!(expected, 4);
                assert_eq!(got, 2);
            }
            other => panic!("expected TruncatedRecord, got {other:?}"),
        }
    }

    #[test]
    fn binary_rejects_trailing_data() {
        let mut bytes = write_to_vec(&sample_stream());
        bytes.push(0);
        assert!(matches!(read_tags_from(&bytes), Err(Error::TrailingData)));
    }

    #[test]
    fn binary_rejects_non_monotonic_records() {
        let mut bytes = write_to_vec(&sample_stream());
        // overwrite record 2 (value 13) with 7, duplicating record 1
        let off = HEADER_LEN + 2 * 8;
        bytes[off..off + 8].copy_from_slice(&7u64.to_le_bytes());
        match read_tags_from(&bytes) {
            Err(Error::NonMonotonicTimestamp { index }) => assert_eq!(index, 2),
            other => panic!("expected NonMonotonicTimestamp, got {other:?}"),
        }
    }

    #[test]
    fn binary_honors_coarse_resolution() {
        let mut bytes = write_to_vec(&TagStream::new(1, vec![1, 2, 5], 5).unwrap());
        bytes[8..16].copy_from_slice(&1000u64.to_le_bytes());
        let back = read_tags_from(&bytes).unwrap();
        assert_eq!(back.tags(), &[1000, 2000, 5000]);
        assert_eq!(back.duration_ps(), 5000);
    }

    #[test]
    fn binary_rejects_timestamp_overflow() {
        // product overflows u64
        let mut bytes = write_to_vec(&TagStream::new(0, vec![1 << 40], 1 << 40).unwrap());
        bytes[8..16].copy_from_slice(&(1u64 << 40).to_le_bytes());
        assert!(matches!(
            read_tags_from(&bytes),
            Err(Error::MalformedHeader(_))
        ));
        // product fits u64 but not i64
        let mut bytes = write_to_vec(&TagStream::new(0, vec![1], 1).unwrap());
        let off = HEADER_LEN;
        bytes[off..off + 8].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(matches!(
            read_tags_from(&bytes),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn binary_detection() {
        let dir = tempfile::tempdir().unwrap();
        let bin = dir.path().join("a.ttg");
        write_tags(&bin, &sample_stream()).unwrap();
        assert!(is_binary_tag_file(&bin).unwrap());

        let text = dir.path().join("b.txt");
        std::fs::write(&text, "# channel\ttimestamp_ps\n0\t5\n").unwrap();
        assert!(!is_binary_tag_file(&text).unwrap());

        let short = dir.path().join("c.txt");
        std::fs::write(&short, "TT").unwrap();
        assert!(!is_binary_tag_file(&short).unwrap());
    }

    #[test]
    fn text_roundtrip_two_channels_share_duration() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tags.txt");
        let a = TagStream::new(0, vec![5, 90, 400], 400).unwrap();
        let b = TagStream::new(1, vec![17, 120, 350, 999], 999).unwrap();
        write_tags_text(&path, &[&a, &b]).unwrap();

        let back_a = read_tags_text(&path, Some(0)).unwrap();
        let back_b = read_tags_text(&path, Some(1)).unwrap();
        assert_eq!(back_a.tags(), a.tags());
        assert_eq!(back_b.tags(), b.tags());
        assert_eq!(back_a.channel(), 0);
        assert_eq!(back_b.channel(), 1);
        // both channels report the acquisition-wide window
        assert_eq!(back_a.duration_ps(), 999);
        assert_eq!(back_b.duration_ps(), 999);
    }

    #[test]
    fn text_single_channel_without_filter() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tags.txt");
        let a = TagStream::new(4, vec![10, 20], 20).unwrap();
        write_tags_text(&path, &[&a]).unwrap();
        let back = read_tags_text(&path, None).unwrap();
        assert_eq!(back.channel(), 4);
        assert_eq!(back.tags(), &[10, 20]);
    }

    #[test]
    fn text_multi_channel_without_filter_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tags.txt");
        let a = TagStream::new(0, vec![10], 10).unwrap();
        let b = TagStream::new(1, vec![20], 20).unwrap();
        write_tags_text(&path, &[&a, &b]).unwrap();
        assert!(matches!(
            read_tags_text(&path, None),
            Err(Error::TextParse { line: 3, .. })
        ));
    }

    #[test]
    fn text_skips_comments_and_blank_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tags.txt");
        std::fs::write(&path, "# header\n\n0\t10\n   \n# note\n0\t25\n").unwrap();
        let back = read_tags_text(&path, None).unwrap();
        assert_eq!(back.tags(), &[10, 25]);
        assert_eq!(back.duration_ps(), 25);
    }

    #[test]
    fn text_parse_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let write = |content: &str| {
            let path = dir.path().join("bad.txt");
            std::fs::write(&path, content).unwrap();
            path
        };
        let cases: &[(&str, usize)] = &[
            ("0\t10\nnot-a-line\n", 2),     // wrong field count
            ("0\t10\t99\n", 1),             // too many fields
            ("banana\t10\n", 1),            // bad channel
            ("0\tbanana\n", 1),             // bad timestamp
            ("0\t-5\n", 1),                 // negative timestamp
            ("0\t10\n0\t10\n", 2),          // duplicate within channel
            ("# c\n0\t20\n0\t10\n", 3),     // decreasing within channel
        ];
        for (content, want_line) in cases {
            let path = write(content);
            match read_tags_text(&path, None) {
                Err(Error::TextParse { line, .. }) => {
                    assert_eq!(line, *want_line, "content {content:?}")
                }
                other => panic!("expected TextParse for {content:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn text_empty_file_gives_empty_stream() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.txt");
        std::fs::write(&path, "# nothing here\n").unwrap();
        let back = read_tags_text(&path, None).unwrap();
        assert!(back.is_empty());
        assert_eq!(back.duration_ps(), 0);
    }

    #[test]
    fn csv_raw_histogram_writes_zero_estimates() {
        let a = TagStream::new(0, vec![0, 10, 20], 20).unwrap();
        let b = TagStream::new(1, vec![5, 15], 20).unwrap();
        let cfg = CorrelatorConfig::new(5, 10, Normalization::Raw).unwrap();
        let hist = correlate(&a, &b, &cfg).unwrap();
        let mut buf = Vec::new();
        write_histogram_csv_to(&mut buf, &hist).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "tau_s,g2,sigma,counts");
        assert_eq!(lines.len(), 1 + hist.counts.len());
        // raw histogram: zero g2/sigma columns, integer counts preserved
        assert_eq!(lines[2], "-2.50000000e-12,0.00000000e0,0.00000000e0,2");
    }

    #[test]
    fn csv_normalized_histogram_roundtrips_numbers() {
        let a = generate_poisson(1e5, 0.01, 5).unwrap();
        let b = generate_poisson(1e5, 0.01, 6).unwrap();
        let cfg = CorrelatorConfig::new(100_000, 1_000_000, Normalization::RateNormalized).unwrap();
        let hist = correlate(&a, &b, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hist.csv");
        write_histogram_csv(&path, &hist).unwrap();

        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("tau_s,g2,sigma,counts"));
        for (k, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 4);
            let tau: f64 = fields[0].parse().unwrap();
            let g2: f64 = fields[1].parse().unwrap();
            let counts: u64 = fields[3].parse().unwrap();
            assert!((tau - hist.bin_centers[k]).abs() <= 1e-8 * hist.bin_centers[k].abs());
            let want_g2 = hist.g2.as_ref().unwrap()[k];
            assert!((g2 - want_g2).abs() <= 1e-7 * want_g2.abs() + 1e-12);
            assert_eq!(counts, hist.counts[k]);
        }
    }

    #[test]
    fn io_errors_carry_the_path() {
        let missing = Path::new("/nonexistent-dir-for-tests/x.ttg");
        match read_tags(missing) {
            Err(Error::Io { path, .. }) => assert_eq!(path, missing),
            other => panic!("expected Io error, got {other:?}"),
        }
    }
}
