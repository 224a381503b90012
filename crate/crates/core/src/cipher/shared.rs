use std::ops::Range;

/// A frame buffer shared between worker lanes.
///
/// Workers follow a phase discipline enforced by barriers: during a phase a
/// buffer is either read by everyone or written at indices that no other
/// worker touches (row ownership for diffusion, the permutation property
/// for confusion). The methods are `unsafe` because that discipline is the
/// caller's to uphold.
#[derive(Clone, Copy)]
pub(crate) struct SharedBuf {
    ptr: *mut u8,
    len: usize,
}

// SAFETY: access is coordinated by the phase discipline described above.
unsafe impl Send for SharedBuf {}
unsafe impl Sync for SharedBuf {}

impl SharedBuf {
    pub(crate) fn new(buf: &mut [u8]) -> Self {
        Self {
            ptr: buf.as_mut_ptr(),
            len: buf.len(),
        }
    }

    /// # Safety
    /// No worker may write the buffer while the returned slice is alive.
    pub(crate) unsafe fn as_slice<'a>(self) -> &'a [u8] {
        std::slice::from_raw_parts(self.ptr, self.len)
    }

    /// # Safety
    /// No other worker may access `range` while the returned slice is alive.
    pub(crate) unsafe fn region_mut<'a>(self, range: Range<usize>) -> &'a mut [u8] {
        assert!(range.start <= range.end && range.end <= self.len);
        std::slice::from_raw_parts_mut(self.ptr.add(range.start), range.end - range.start)
    }

    /// # Safety
    /// No worker may be writing index `i`.
    #[inline]
    pub(crate) unsafe fn read(self, i: usize) -> u8 {
        assert!(i < self.len);
        self.ptr.add(i).read()
    }

    /// # Safety
    /// No other worker may access index `i`.
    #[inline]
    pub(crate) unsafe fn write(self, i: usize, v: u8) {
        assert!(i < self.len);
        self.ptr.add(i).write(v)
    }

    /// # Safety
    /// No other worker may access indices `i..i + 3`.
    #[inline]
    pub(crate) unsafe fn write_pixel(self, i: usize, px: [u8; 3]) {
        assert!(i + 3 <= self.len);
        std::ptr::copy_nonoverlapping(px.as_ptr(), self.ptr.add(i), 3);
    }
}
