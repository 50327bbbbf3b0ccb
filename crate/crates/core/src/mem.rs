//! Allocation hints for the large arrays touched by random walks.

/// Asks the kernel to back the reserved (not yet written) capacity of `v`
/// with transparent huge pages. Random walks on graphs with millions of
/// nodes otherwise spend much of their time on TLB misses. No-op for small
/// buffers and on other platforms.
pub(crate) fn advise_huge_pages<T>(v: &Vec<T>) {
    #[cfg(target_os = "linux")]
    {
        const HUGE: usize = 2 << 20;
        let bytes = v.capacity() * std::mem::size_of::<T>();
        if bytes < 2 * HUGE {
            return;
        }
        let start = v.as_ptr() as usize;
        let lo = (start + HUGE - 1) & !(HUGE - 1);
        let hi = (start + bytes) & !(HUGE - 1);
        if hi > lo {
            // SAFETY: the range lies inside the allocation owned by `v`, and
            // MADV_HUGEPAGE only changes how pages are backed, not their content.
            unsafe {
                libc::madvise(lo as *mut libc::c_void, hi - lo, libc::MADV_HUGEPAGE);
            }
        }
    }
    #[cfg(not(target_os = "linux"))]
    let _ = v;
}
